#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isci/json_io.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

json bound_entry(double v) {
    if (v == isci::kNegInf) return json("-inf");
    return json(v);
}

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("ISCI_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0; // all cores
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open output file: " + out_path);
    os << text;
}

std::string scenario_csv(const isci::Scenario& s, const isci::ScenarioResult& r) {
    std::ostringstream os;
    os.precision(10);
    os << "hypothesis,method,power,mean_bound_finite,mean_bound_rejected,pct_finite\n";
    const auto emit = [&](const std::string& method, const isci::MethodMetrics& mm) {
        for (std::size_t j = 0; j < s.graph.size(); ++j) {
            os << s.graph.labels[j] << ',' << method << ',' << mm.power[j] << ','
               << mm.mean_bound_finite[j] << ',' << mm.mean_bound_rejected[j] << ','
               << mm.pct_finite[j] << '\n';
        }
    };
    emit("isci", r.isci);
    emit("csci", r.csci);
    return os.str();
}

std::string curve_csv(const std::vector<isci::TradeOffRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "q,mean_bound_rejected,se_bound,mean_rejections,se_rejections\n";
    for (const auto& row : rows)
        os << row.q << ',' << row.mean_bound_rejected << ',' << row.se_bound << ','
           << row.mean_rejections << ',' << row.se_rejections << '\n';
    return os.str();
}

int cmd_validate(const std::string& graph_path) {
    json j;
    try {
        j = isci::load_json_file(graph_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    isci::HypothesisGraph g;
    try {
        g = isci::graph_from_json(j);
    } catch (const std::exception& e) {
        std::cerr << "error: ill-formed graph: " << e.what() << "\n";
        return kExitInput;
    }
    const isci::ValidationReport rep = isci::validate_graph(g);
    std::cout << "graph: " << graph_path << "\n"
              << "hypotheses: " << g.size() << "\n"
              << "valid: " << (rep.valid ? "yes" : "no") << "\n"
              << "complete: " << (rep.complete ? "yes" : "no") << "\n";
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    return rep.valid ? kExitOk : kExitInvalid;
}

struct BoundsArgs {
    std::string graph_path, estimates_path, method = "isci", out_path;
    double q = 0.5;
    bool q_given = false;
    double eps = 1e-8;
    std::size_t max_iter = 10000;
    double alpha = -1.0;
};

int cmd_bounds(const BoundsArgs& a) {
    isci::HypothesisGraph g;
    isci::EstimatesInput in;
    try {
        g = isci::graph_from_json(isci::load_json_file(a.graph_path));
        in = isci::estimates_from_json(isci::load_json_file(a.estimates_path));
        if (a.alpha > 0.0) {
            // rescale the initial levels so the level sum tracks alpha
            const double scale = a.alpha / g.alpha;
            for (double& l : g.initial_levels) l *= scale;
            g.alpha = a.alpha;
        }
        if (in.models.size() != g.size())
            throw std::invalid_argument("estimate count does not match graph size");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    const isci::ValidationReport rep = isci::validate_graph(g);
    if (!rep.valid) {
        for (const auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
        return kExitInvalid;
    }

    json out;
    out["method"] = a.method;
    try {
        isci::BoundsVector b;
        std::size_t iterations = 0;
        bool converged = true;
        if (a.method == "isci") {
            isci::SolveOptions opt;
            opt.eps = a.eps;
            opt.max_iter = a.max_iter;
            opt.record_trace = false;
            const auto bc = isci::compute_bounds(
                g, in.models, isci::InformationWeightSpec::uniform(a.q), in.shifts, opt);
            b = bc.bounds;
            iterations = bc.trace.iterations;
            converged = bc.trace.converged;
            if (!converged) {
                std::cerr << "error: no convergence after " << iterations
                          << " iterations (last step norm " << bc.trace.final_step_norm
                          << ")\n";
                return kExitNumeric;
            }
        } else if (a.method == "bonferroni") {
            if (a.q_given) std::cerr << "warning: --q is ignored for method bonferroni\n";
            b = isci::bonferroni_bounds(in.models, g.initial_levels, in.shifts);
        } else if (a.method == "fallback") {
            isci::FallbackSpec spec;
            for (double l : g.initial_levels) spec.weights.push_back(l / g.alpha);
            spec.q = a.q;
            b = isci::fallback_bounds(spec, g.alpha, in.models, in.shifts);
        } else if (a.method == "csci") {
            if (a.q_given) std::cerr << "warning: --q is ignored for method csci\n";
            b = isci::compatible_sci(g, in.models, in.shifts);
        } else {
            std::cerr << "error: unknown method " << a.method << "\n";
            return kExitInput;
        }

        json L = json::array();
        json rejected = json::array();
        for (std::size_t j = 0; j < b.lower.size(); ++j) {
            L.push_back(bound_entry(b.lower[j]));
            if (b.lower[j] >= -in.shifts.at(j)) rejected.push_back(g.labels[j]);
        }
        out["L"] = L;
        out["rejected"] = rejected;
        out["iterations"] = iterations;
        out["converged"] = converged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    write_text(a.out_path, out.dump(2) + "\n");
    return kExitOk;
}

struct SimulateArgs {
    std::string scenario_path, out_path;
    long long seed = -1;
    long long n_sims = -1;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    isci::ScenarioConfig cfg;
    try {
        cfg = isci::scenario_from_json(isci::load_json_file(a.scenario_path));
        if (a.seed >= 0) cfg.scenario.seed = static_cast<std::uint64_t>(a.seed);
        if (a.n_sims > 0) cfg.scenario.n_sims = static_cast<std::size_t>(a.n_sims);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    const unsigned threads = resolve_threads(a.threads);
    try {
        if (!cfg.q_grid.empty()) {
            std::cerr << "running trade-off curve over " << cfg.q_grid.size()
                      << " information weights, " << cfg.scenario.n_sims
                      << " replications each\n";
            const auto rows = isci::trade_off_curve(cfg.scenario, cfg.q_grid, threads);
            write_text(a.out_path, curve_csv(rows));
        } else {
            std::cerr << "running scenario" << (cfg.name.empty() ? "" : " " + cfg.name)
                      << ": " << cfg.scenario.n_sims << " replications\n";
            const auto res = isci::run_scenario(cfg.scenario, threads);
            write_text(a.out_path, scenario_csv(cfg.scenario, res));
            std::cerr.precision(6);
            std::cerr << "coverage: isci " << res.isci.coverage << ", csci "
                      << res.csci.coverage << "\n";
            if (res.solver_failures || res.nonconverged)
                std::cerr << "solver failures: " << res.solver_failures
                          << ", non-converged: " << res.nonconverged << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

struct CalibrateArgs {
    double alpha_local = 0.0125;
    double beta = 0.2;
    double delta_n = 0.0;
    double delta_e = 0.0;
    double target = -1.0;
    std::string out_path;
};

int cmd_calibrate(const CalibrateArgs& a) {
    try {
        const double info = isci::design_information(a.alpha_local, a.beta, a.delta_n);
        json out;
        out["information"] = info;
        if (a.delta_e > 0.0) {
            const double ae = isci::design_alpha_for_effect(info, a.beta, a.delta_e);
            out["alpha_for_effect"] = ae;
            const double target = a.target > 0.0 ? a.target : ae;
            out["q"] = isci::calibrate_information_weight(target, a.alpha_local, a.delta_n);
        } else if (a.target > 0.0) {
            out["q"] = isci::calibrate_information_weight(a.target, a.alpha_local, a.delta_n);
        }
        write_text(a.out_path, out.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"informative simultaneous confidence intervals for graphical test procedures"};
    app.require_subcommand(1);

    std::string graph_path;
    auto* validate = app.add_subcommand("validate", "check a graph file");
    validate->add_option("graph", graph_path, "graph JSON file")->required();

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "compute lower SCI bounds");
    bounds->add_option("graph", ba.graph_path, "graph JSON file")->required();
    bounds->add_option("--estimates", ba.estimates_path, "estimates JSON file")->required();
    auto* qopt = bounds->add_option("--q", ba.q, "information weight in (0,1]");
    bounds->add_option("--method", ba.method, "isci|bonferroni|fallback|csci");
    bounds->add_option("--eps", ba.eps, "convergence threshold");
    bounds->add_option("--max-iter", ba.max_iter, "iteration cap");
    bounds->add_option("--alpha", ba.alpha, "override overall level (rescales initial levels)");
    bounds->add_option("--out", ba.out_path, "output file (stdout when absent)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo scenario");
    simulate->add_option("scenario", sa.scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", sa.out_path, "output CSV (stdout when absent)");
    simulate->add_option("--seed", sa.seed, "override the scenario seed");
    simulate->add_option("--n-sims", sa.n_sims, "override the replication count");
    simulate->add_option("--threads", sa.threads, "worker threads (ISCI_THREADS, then all cores)");

    CalibrateArgs ca;
    auto* calibrate = app.add_subcommand("calibrate", "power/information design arithmetic");
    calibrate->add_option("--alpha-local", ca.alpha_local, "local level")->required();
    calibrate->add_option("--beta", ca.beta, "type II error")->required();
    calibrate->add_option("--delta-n", ca.delta_n, "design margin")->required();
    calibrate->add_option("--delta-e", ca.delta_e, "larger effect to power");
    calibrate->add_option("--target", ca.target, "target local level for q");
    calibrate->add_option("--out", ca.out_path, "output file (stdout when absent)");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return cmd_validate(graph_path);
    if (bounds->parsed()) {
        ba.q_given = qopt->count() > 0;
        return cmd_bounds(ba);
    }
    if (simulate->parsed()) return cmd_simulate(sa);
    if (calibrate->parsed()) return cmd_calibrate(ca);
    return kExitInput;
}
