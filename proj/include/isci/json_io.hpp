#pragma once

#include <string>

#include <json.hpp>

#include "isci/sim.hpp"

namespace isci {

// Graph schema:
// {"labels":[...], "alpha":0.025, "initial_levels":[...], "transitions":[[...],...]}
HypothesisGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const HypothesisGraph& g);

// Estimates schema: {"estimates":[...], "se":[...], "shifts":[...]?}
struct EstimatesInput {
    std::vector<MarginalModel> models;
    ShiftSpec shifts;
};
EstimatesInput estimates_from_json(const nlohmann::json& j);

// Scenario schema:
// {"graph": <graph>, "q": {"uniform": x} | {"values": [...]},
//  "theta": [...], "se": [...], "corr": [[...],...], "shifts": [...]?,
//  "n_sims": N, "seed": S, "eps"?: e, "max_iter"?: k,
//  "q_grid"?: [...], "name"?: "..."}
struct ScenarioConfig {
    Scenario scenario;
    std::vector<double> q_grid; // non-empty selects trade-off-curve mode
    std::string name;
};
ScenarioConfig scenario_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

} // namespace isci
