#include "coda/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coda/generators.hpp"

namespace coda {

namespace {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && !s.empty();
}

bool parse_long(const std::string& s, long& out) {
    char* end = nullptr;
    out = std::strtol(s.c_str(), &end, 10);
    return end && *end == '\0' && !s.empty();
}

const std::vector<std::string> kKnownChecks = {"clusters", "layers", "limits",
                                               "complete"};

}  // namespace

ValidationResult validate_config(const std::string& raw_text) {
    ValidationResult result;
    ScenarioConfig cfg;
    auto err = [&result](int line, const std::string& msg) {
        result.errors.push_back("line " + std::to_string(line) + ": " + msg);
    };

    std::map<std::string, int> seen;
    bool have_topology = false, have_model = false;
    std::istringstream in(raw_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            err(lineno, "expected `key = value`");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (seen.count(key)) {
            err(lineno, "duplicate key `" + key + "` (first on line " +
                            std::to_string(seen[key]) + ")");
            continue;
        }
        seen[key] = lineno;

        if (key == "topology") {
            have_topology = true;
            std::istringstream vs(value);
            std::string kind, arg, extra;
            vs >> kind >> arg;
            if (vs >> extra) {
                err(lineno, "topology: trailing tokens");
                continue;
            }
            // Accept `complete:10` as well as `complete 10` for flag ergonomics.
            if (arg.empty())
                if (auto c = kind.find(':'); c != std::string::npos) {
                    arg = kind.substr(c + 1);
                    kind = kind.substr(0, c);
                }
            long n = 0;
            if (kind == "complete") {
                cfg.topology = ScenarioConfig::Topology::Complete;
                if (!parse_long(arg, n) || n < 2)
                    err(lineno, "topology: complete graph requires n >= 2");
                cfg.n = static_cast<int>(n);
            } else if (kind == "ring") {
                cfg.topology = ScenarioConfig::Topology::Ring;
                if (!parse_long(arg, n) || n < 3)
                    err(lineno, "topology: ring requires n >= 3");
                cfg.n = static_cast<int>(n);
            } else if (kind == "lattice") {
                cfg.topology = ScenarioConfig::Topology::Lattice;
                auto dims = split(arg, 'x');
                long r = 0, c = 0;
                if (dims.size() != 2 || !parse_long(dims[0], r) ||
                    !parse_long(dims[1], c) || r < 2 || c < 2)
                    err(lineno, "topology: lattice requires RxC with R,C >= 2");
                cfg.rows = static_cast<int>(r);
                cfg.cols = static_cast<int>(c);
                cfg.n = cfg.rows * cfg.cols;
            } else if (kind == "edges") {
                cfg.topology = ScenarioConfig::Topology::Edges;
                if (arg.empty()) err(lineno, "topology: edges requires a file path");
                cfg.edges_path = arg;
                cfg.n = 0;  // determined by the file
            } else {
                err(lineno, "topology: unknown kind `" + kind + "`");
            }
        } else if (key == "model") {
            have_model = true;
            std::istringstream vs(value);
            std::string kind, arg;
            vs >> kind >> arg;
            if (arg.empty())
                if (auto c = kind.find(':'); c != std::string::npos) {
                    arg = kind.substr(c + 1);
                    kind = kind.substr(0, c);
                }
            if (kind == "coca") {
                cfg.model.model = Model::Coca;
            } else if (kind == "coda") {
                cfg.model.model = Model::Coda;
            } else if (kind == "martins") {
                cfg.model.model = Model::Martins;
                double a = 0.0;
                if (!parse_double(arg, a) || !(a >= 0.5 && a < 1.0))
                    err(lineno, "model: martins requires alpha in [1/2, 1)");
                cfg.model.alpha = a;
            } else {
                err(lineno, "model: unknown model `" + kind + "`");
            }
        } else if (key == "init") {
            std::istringstream vs(value);
            std::string kind, arg;
            vs >> kind >> arg;
            if (kind == "uniform") {
                cfg.init = ScenarioConfig::Init::Uniform;
            } else if (kind == "explicit" || kind == "symmetric-pairs") {
                cfg.init = kind == "explicit" ? ScenarioConfig::Init::Explicit
                                              : ScenarioConfig::Init::SymmetricPairs;
                cfg.init_values.clear();
                if (kind == "explicit" && arg.empty()) {
                    err(lineno, "init: explicit requires a value list");
                } else if (!arg.empty()) {
                    for (const std::string& tok : split(arg, ',')) {
                        double v = 0.0;
                        if (!parse_double(tok, v)) {
                            err(lineno, "init: bad number `" + tok + "`");
                            continue;
                        }
                        cfg.init_values.push_back(v);
                    }
                }
            } else {
                err(lineno, "init: unknown kind `" + kind + "`");
            }
        } else if (key == "seed") {
            long s = 0;
            if (!parse_long(value, s) || s < 0)
                err(lineno, "seed must be a non-negative integer");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "steps") {
            long s = 0;
            if (!parse_long(value, s) || s < 1)
                err(lineno, "steps must be >= 1");
            cfg.stop.max_steps = s;
        } else if (key == "tol_p") {
            double t = 0.0;
            if (!parse_double(value, t) || !(t > 0.0))
                err(lineno, "tol_p must be > 0");
            cfg.stop.tol_p = t;
        } else if (key == "window") {
            long w = 0;
            if (!parse_long(value, w) || w < 1) err(lineno, "window must be >= 1");
            cfg.stop.q_window = static_cast<int>(w);
        } else if (key == "osc_window") {
            long w = 0;
            if (!parse_long(value, w) || w < 1)
                err(lineno, "osc_window must be >= 1");
            cfg.stop.osc_window = static_cast<int>(w);
        } else if (key == "stride") {
            long s = 0;
            if (!parse_long(value, s)) err(lineno, "stride must be an integer");
            cfg.stride = static_cast<int>(s);
        } else if (key == "out_trace") {
            cfg.out_trace = value;
        } else if (key == "out_report") {
            cfg.out_report = value;
        } else if (key == "checks") {
            cfg.checks.clear();
            if (!value.empty()) {
                for (const std::string& tok : split(value, ',')) {
                    const std::string name = trim(tok);
                    if (name == "all") {
                        cfg.checks = kKnownChecks;
                    } else if (std::find(kKnownChecks.begin(), kKnownChecks.end(),
                                         name) != kKnownChecks.end()) {
                        cfg.checks.push_back(name);
                    } else {
                        err(lineno, "checks: unknown check `" + name + "`");
                    }
                }
            }
        } else {
            err(lineno, "unknown key `" + key + "`");
        }
    }

    if (!have_topology) result.errors.push_back("missing required key `topology`");
    if (!have_model) result.errors.push_back("missing required key `model`");

    const bool quantized = cfg.model.model != Model::Coca;
    if (cfg.init == ScenarioConfig::Init::Explicit) {
        for (std::size_t i = 0; i < cfg.init_values.size(); ++i) {
            const double v = cfg.init_values[i];
            if (!(v > 0.0 && v < 1.0))
                result.errors.push_back("init: value " + std::to_string(i + 1) +
                                        " must lie in (0,1)");
            else if (quantized && v == 0.5)
                result.errors.push_back(
                    "init: value " + std::to_string(i + 1) +
                    " equals 1/2; quantized models require p(0) != 1/2");
        }
        if (cfg.n > 0 && cfg.init_values.size() != static_cast<std::size_t>(cfg.n))
            result.errors.push_back("init: expected " + std::to_string(cfg.n) +
                                    " values, got " +
                                    std::to_string(cfg.init_values.size()));
    } else if (cfg.init == ScenarioConfig::Init::SymmetricPairs) {
        if (cfg.n > 0 && cfg.n % 2 != 0)
            result.errors.push_back("init: symmetric-pairs requires even n");
        for (std::size_t i = 0; i < cfg.init_values.size(); ++i)
            if (!(cfg.init_values[i] > 0.0 && cfg.init_values[i] < 0.5))
                result.errors.push_back("init: eta " + std::to_string(i + 1) +
                                        " must lie in (0, 1/2)");
        if (!cfg.init_values.empty() && cfg.n > 0 &&
            cfg.init_values.size() != static_cast<std::size_t>(cfg.n / 2))
            result.errors.push_back("init: expected " + std::to_string(cfg.n / 2) +
                                    " eta values, got " +
                                    std::to_string(cfg.init_values.size()));
    }

    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "topology = ";
    switch (cfg.topology) {
        case ScenarioConfig::Topology::Complete: out << "complete " << cfg.n; break;
        case ScenarioConfig::Topology::Ring: out << "ring " << cfg.n; break;
        case ScenarioConfig::Topology::Lattice:
            out << "lattice " << cfg.rows << 'x' << cfg.cols;
            break;
        case ScenarioConfig::Topology::Edges: out << "edges " << cfg.edges_path; break;
    }
    out << "\nmodel = ";
    switch (cfg.model.model) {
        case Model::Coca: out << "coca"; break;
        case Model::Coda: out << "coda"; break;
        case Model::Martins: out << "martins " << format_double(cfg.model.alpha); break;
    }
    out << "\ninit = ";
    switch (cfg.init) {
        case ScenarioConfig::Init::Uniform: out << "uniform"; break;
        case ScenarioConfig::Init::Explicit: out << "explicit "; break;
        case ScenarioConfig::Init::SymmetricPairs: out << "symmetric-pairs"; break;
    }
    if (cfg.init != ScenarioConfig::Init::Uniform) {
        if (cfg.init == ScenarioConfig::Init::SymmetricPairs &&
            !cfg.init_values.empty())
            out << ' ';
        for (std::size_t i = 0; i < cfg.init_values.size(); ++i)
            out << (i ? "," : "") << format_double(cfg.init_values[i]);
    }
    out << "\nseed = " << cfg.seed;
    out << "\nsteps = " << cfg.stop.max_steps;
    out << "\ntol_p = " << format_double(cfg.stop.tol_p);
    out << "\nwindow = " << cfg.stop.q_window;
    out << "\nosc_window = " << cfg.stop.osc_window;
    out << "\nstride = " << cfg.stride;
    out << "\nout_trace = " << cfg.out_trace;
    out << "\nout_report = " << cfg.out_report;
    out << "\nchecks = ";
    for (std::size_t i = 0; i < cfg.checks.size(); ++i)
        out << (i ? "," : "") << cfg.checks[i];
    out << '\n';
    return out.str();
}

Graph minority10_graph() {
    // {1,2,3,4} is a clique; each of {5,6,7,8} has three influencers in the
    // clique plus agent 9; agent 10 hangs off agent 9. 0-indexed here.
    const std::vector<std::pair<int, int>> edges = {
        {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
        {4, 0}, {4, 1}, {4, 2},
        {5, 1}, {5, 2}, {5, 3},
        {6, 2}, {6, 3}, {6, 0},
        {7, 3}, {7, 0}, {7, 1},
        {8, 4}, {8, 5}, {8, 6}, {8, 7},
        {9, 8},
    };
    return Graph::from_edges(10, edges, false);
}

std::vector<std::string> builtin_scenario_names() {
    return {"minority10", "lattice6", "complete100sym"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig cfg;
    if (name == "minority10") {
        cfg.topology = ScenarioConfig::Topology::Edges;
        cfg.edges_path = "builtin:minority10";
        cfg.n = 10;
        cfg.init = ScenarioConfig::Init::Explicit;
        cfg.init_values = {0.20, 0.30, 0.25, 0.35, 0.70,
                           0.65, 0.75, 0.60, 0.65, 0.80};
        cfg.model.model = Model::Coda;
        cfg.stop.max_steps = 2000000;
        cfg.stop.tol_p = 5e-13;
        cfg.stride = 100;
        cfg.checks = {"clusters", "layers", "limits"};
    } else if (name == "lattice6") {
        cfg.topology = ScenarioConfig::Topology::Lattice;
        cfg.rows = cfg.cols = 6;
        cfg.n = 36;
        cfg.init = ScenarioConfig::Init::Uniform;
        cfg.seed = 42;
        cfg.model.model = Model::Coda;
        cfg.stop.max_steps = 3000000;
        cfg.stop.tol_p = 5e-13;
        cfg.stride = 1000;
        cfg.checks = {"clusters", "layers", "limits"};
    } else if (name == "complete100sym") {
        cfg.topology = ScenarioConfig::Topology::Complete;
        cfg.n = 100;
        cfg.init = ScenarioConfig::Init::SymmetricPairs;
        cfg.seed = 7;
        cfg.model.model = Model::Coda;
        cfg.stop.max_steps = 20000;
        cfg.stride = 1;
        cfg.checks = {"complete"};
    } else {
        throw std::invalid_argument("unknown builtin scenario `" + name + "`");
    }
    return cfg;
}

Graph build_topology(const ScenarioConfig& cfg) {
    switch (cfg.topology) {
        case ScenarioConfig::Topology::Complete: return Graph::complete(cfg.n);
        case ScenarioConfig::Topology::Ring: return Graph::ring(cfg.n);
        case ScenarioConfig::Topology::Lattice:
            return Graph::lattice(cfg.rows, cfg.cols);
        case ScenarioConfig::Topology::Edges: {
            if (cfg.edges_path == "builtin:minority10") return minority10_graph();
            std::ifstream in(cfg.edges_path);
            if (!in)
                throw std::runtime_error("cannot open edge list file `" +
                                         cfg.edges_path + "`");
            return Graph::parse_edge_list(in);
        }
    }
    throw std::logic_error("unreachable topology kind");
}

std::vector<double> build_initial_opinions(const ScenarioConfig& cfg,
                                           const Graph& g) {
    std::mt19937_64 rng(cfg.seed);
    switch (cfg.init) {
        case ScenarioConfig::Init::Explicit:
            if (cfg.init_values.size() != static_cast<std::size_t>(g.size()))
                throw std::invalid_argument("explicit init has wrong length");
            return cfg.init_values;
        case ScenarioConfig::Init::Uniform:
            return random_opinions(rng, g.size());
        case ScenarioConfig::Init::SymmetricPairs:
            if (g.size() % 2 != 0)
                throw std::invalid_argument("symmetric-pairs requires even n");
            if (!cfg.init_values.empty()) {
                if (cfg.init_values.size() !=
                    static_cast<std::size_t>(g.size() / 2))
                    throw std::invalid_argument("eta list has wrong length");
                return symmetric_pair_opinions(cfg.init_values);
            }
            return symmetric_pair_opinions(rng, g.size());
    }
    throw std::logic_error("unreachable init kind");
}

namespace {

nlohmann::json agents_1indexed(const std::vector<int>& agents) {
    nlohmann::json arr = nlohmann::json::array();
    for (int a : agents) arr.push_back(a + 1);
    return arr;
}

bool action_side_ok(double p, int action) {
    return action == 0 ? p <= 0.5 + 1e-12 : p >= 0.5 - 1e-12;
}

}  // namespace

nlohmann::json cluster_report_json(const ClusterReport& report) {
    nlohmann::json j;
    j["clusters"] = nlohmann::json::array();
    for (const auto& c : report.clusters)
        j["clusters"].push_back(
            {{"agents", agents_1indexed(c.agents)}, {"action", c.action}});
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : report.layers) j["layers"].push_back(agents_1indexed(layer));
    j["layer_action"] = report.layer_action;
    j["uncovered"] = agents_1indexed(report.uncovered);
    return j;
}

std::vector<CheckResult> evaluate_checks(const Graph& g,
                                         const SimulationTrace& trace,
                                         const std::vector<std::string>& names) {
    std::vector<CheckResult> results;
    if (trace.recorded_steps.empty() || trace.recorded_steps.front() != 0)
        throw std::invalid_argument("checks need a trace with the initial snapshot");
    const auto& q0 = trace.q.front();
    const std::size_t snapshots = trace.q.size();
    const std::size_t tail_from = snapshots - std::max<std::size_t>(1, snapshots / 10);

    ClusterReport clusters;
    bool have_clusters = false;
    auto need_clusters = [&]() {
        if (!have_clusters) {
            clusters = find_maximal_robust_clusters(g, q0);
            have_clusters = true;
        }
    };

    for (const std::string& name : names) {
        CheckResult r{name, true, ""};
        if (name == "clusters") {
            need_clusters();
            if (clusters.clusters.empty()) {
                r.detail = "no robust clusters detected";
            } else {
                for (const auto& c : clusters.clusters) {
                    for (std::size_t s = 0; s < snapshots && r.pass; ++s)
                        for (int i : c.agents)
                            if (trace.q[s][i] != c.action) {
                                r.pass = false;
                                r.detail = "agent " + std::to_string(i + 1) +
                                           " left its cluster action at step " +
                                           std::to_string(trace.recorded_steps[s]);
                                break;
                            }
                    for (int i : c.agents)
                        if (r.pass && !action_side_ok(trace.final_p[i], c.action)) {
                            r.pass = false;
                            r.detail = "agent " + std::to_string(i + 1) +
                                       " finished on the wrong side of 1/2";
                        }
                }
                if (r.pass)
                    r.detail = std::to_string(clusters.clusters.size()) +
                               " cluster(s) preserved";
            }
        } else if (name == "layers") {
            need_clusters();
            if (clusters.clusters.empty()) {
                r.detail = "no robust clusters, no layers to check";
            } else {
                int checked = 0;
                for (const auto& c : clusters.clusters) {
                    const auto layered = diffusion_layers(g, c.agents, q0);
                    for (const auto& layer : layered.layers)
                        for (int i : layer) {
                            ++checked;
                            for (std::size_t s = tail_from; s < snapshots; ++s)
                                if (trace.q[s][i] != layered.layer_action) {
                                    r.pass = false;
                                    r.detail =
                                        "agent " + std::to_string(i + 1) +
                                        " did not settle on the diffused action";
                                    break;
                                }
                        }
                }
                if (r.pass)
                    r.detail = std::to_string(checked) +
                               " layered agent(s) settled on the predicted action";
            }
        } else if (name == "limits") {
            if (trace.termination != Termination::Converged) {
                r.detail = "verdict is not `converged`; membership not applicable";
            } else {
                const EquilibriumSet set(g.size());
                for (std::size_t i = 0; i < trace.final_p.size(); ++i)
                    if (!set.contains(trace.final_p[i], 1e-6)) {
                        r.pass = false;
                        r.detail = "agent " + std::to_string(i + 1) + " limit " +
                                   format_double(trace.final_p[i]) +
                                   " is not near any admissible rational";
                        break;
                    }
                if (r.pass) r.detail = "all limits in the admissible rational set";
            }
        } else if (name == "complete") {
            if (g != Graph::complete(g.size())) {
                r.detail = "topology is not complete; skipped";
            } else {
                const auto pred = predict_complete_graph(g, q0);
                if (pred == CompletePrediction::SymmetricOscillationCandidate) {
                    r.detail = std::string("tied actions: prediction deferred; verdict ") +
                               termination_name(trace.termination);
                } else {
                    const int want = pred == CompletePrediction::AllToZero ? 0 : 1;
                    for (std::size_t i = 0; i < trace.final_q.size(); ++i)
                        if (trace.final_q[i] != want) {
                            r.pass = false;
                            r.detail = "agent " + std::to_string(i + 1) +
                                       " disagrees with the majority forecast";
                            break;
                        }
                    if (r.pass)
                        r.detail = std::string("majority forecast `") +
                                   complete_prediction_name(pred) + "` confirmed";
                }
            }
        } else {
            r.pass = false;
            r.detail = "unknown check";
        }
        results.push_back(std::move(r));
    }
    return results;
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    ScenarioOutcome outcome;
    const Graph g = build_topology(cfg);
    const std::vector<double> p0 = build_initial_opinions(cfg, g);

    RunOptions opt;
    opt.stop = cfg.stop;
    opt.record_stride = cfg.stride;
    opt.checks.closure = true;
    outcome.trace = run(g, p0, cfg.model, opt);
    outcome.checks = evaluate_checks(g, outcome.trace, cfg.checks);

    nlohmann::json report;
    report["scenario"] = serialize_config(cfg);
    report["termination"] = termination_name(outcome.trace.termination);
    report["steps"] = outcome.trace.steps;
    report["final_p"] = outcome.trace.final_p;
    nlohmann::json fq = nlohmann::json::array();
    for (auto q : outcome.trace.final_q) fq.push_back(static_cast<int>(q));
    report["final_q"] = fq;
    report["invariant_violations"] = outcome.trace.violations;
    report["predictions"] =
        cluster_report_json(find_maximal_robust_clusters(g, outcome.trace.q.front()));
    report["checks"] = nlohmann::json::array();
    bool all_pass = outcome.trace.violation_count == 0;
    for (const auto& c : outcome.checks) {
        report["checks"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all_pass = all_pass && c.pass;
    }
    outcome.report = std::move(report);
    outcome.exit_code = all_pass ? 0 : 2;

    if (!cfg.out_trace.empty()) {
        std::ofstream out(cfg.out_trace);
        if (!out) throw std::runtime_error("cannot write trace to `" + cfg.out_trace + "`");
        write_trace_csv(out, outcome.trace);
    }
    if (!cfg.out_report.empty()) {
        std::ofstream out(cfg.out_report);
        if (!out)
            throw std::runtime_error("cannot write report to `" + cfg.out_report + "`");
        out << outcome.report.dump(2) << '\n';
    }
    return outcome;
}

}  // namespace coda
