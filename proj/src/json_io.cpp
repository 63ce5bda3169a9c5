#include "isci/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace isci {

using nlohmann::json;

namespace {
std::vector<double> number_list(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw std::invalid_argument("missing or non-array field: " + key);
    std::vector<double> out;
    for (const auto& v : j.at(key)) out.push_back(v.get<double>());
    return out;
}
} // namespace

HypothesisGraph graph_from_json(const json& j) {
    HypothesisGraph g;
    if (!j.contains("labels") || !j.at("labels").is_array())
        throw std::invalid_argument("graph: missing labels");
    for (const auto& l : j.at("labels")) g.labels.push_back(l.get<std::string>());
    g.alpha = j.at("alpha").get<double>();
    g.initial_levels = number_list(j, "initial_levels");
    if (!j.contains("transitions") || !j.at("transitions").is_array())
        throw std::invalid_argument("graph: missing transitions");
    const std::size_t m = g.labels.size();
    const auto& rows = j.at("transitions");
    if (rows.size() != m) throw std::invalid_argument("graph: transitions row count mismatch");
    g.transitions.reserve(m * m);
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != m)
            throw std::invalid_argument("graph: transitions must be m x m");
        for (const auto& v : row) g.transitions.push_back(v.get<double>());
    }
    return g;
}

json graph_to_json(const HypothesisGraph& g) {
    json j;
    j["labels"] = g.labels;
    j["alpha"] = g.alpha;
    j["initial_levels"] = g.initial_levels;
    json rows = json::array();
    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m; ++k) row.push_back(g.g(i, k));
        rows.push_back(row);
    }
    j["transitions"] = rows;
    return j;
}

EstimatesInput estimates_from_json(const json& j) {
    EstimatesInput in;
    const std::vector<double> est = number_list(j, "estimates");
    const std::vector<double> se = number_list(j, "se");
    if (est.size() != se.size())
        throw std::invalid_argument("estimates: se length does not match estimates");
    for (std::size_t k = 0; k < est.size(); ++k)
        in.models.push_back(MarginalModel{est[k], se[k]});
    if (j.contains("shifts")) {
        in.shifts.offset = number_list(j, "shifts");
        if (in.shifts.offset.size() != est.size())
            throw std::invalid_argument("estimates: shifts length does not match estimates");
    }
    return in;
}

ScenarioConfig scenario_from_json(const json& j) {
    ScenarioConfig cfg;
    Scenario& s = cfg.scenario;
    s.graph = graph_from_json(j.at("graph"));
    const std::size_t m = s.graph.size();

    if (!j.contains("q")) throw std::invalid_argument("scenario: missing q");
    const auto& q = j.at("q");
    if (q.is_object() && q.contains("uniform")) {
        s.weights = InformationWeightSpec::uniform(q.at("uniform").get<double>());
    } else if (q.is_object() && q.contains("values")) {
        std::vector<double> qs;
        for (const auto& v : q.at("values")) qs.push_back(v.get<double>());
        s.weights = InformationWeightSpec::per_hypothesis(std::move(qs));
    } else if (q.is_number()) {
        s.weights = InformationWeightSpec::uniform(q.get<double>());
    } else {
        throw std::invalid_argument("scenario: q must be a number, {\"uniform\":x} or {\"values\":[...]}");
    }

    s.true_theta = number_list(j, "theta");
    s.se = number_list(j, "se");
    if (j.contains("shifts")) s.shifts.offset = number_list(j, "shifts");

    if (!j.contains("corr") || !j.at("corr").is_array())
        throw std::invalid_argument("scenario: missing corr");
    const auto& rows = j.at("corr");
    if (rows.size() != m) throw std::invalid_argument("scenario: corr row count mismatch");
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != m)
            throw std::invalid_argument("scenario: corr must be m x m");
        for (const auto& v : row) s.correlation.push_back(v.get<double>());
    }

    s.n_sims = j.at("n_sims").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("eps")) s.eps = j.at("eps").get<double>();
    if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<std::size_t>();
    if (j.contains("q_grid")) cfg.q_grid = number_list(j, "q_grid");
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    return cfg;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

} // namespace isci
