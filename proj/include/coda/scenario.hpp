#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coda/analysis.hpp"
#include "coda/dynamics.hpp"
#include "coda/graph.hpp"

namespace coda {

/// Flat key = value scenario description. See serialize_config for the
/// canonical text form.
struct ScenarioConfig {
    enum class Topology { Complete, Ring, Lattice, Edges };
    Topology topology = Topology::Complete;
    int n = 0;          // complete / ring
    int rows = 0, cols = 0;  // lattice
    std::string edges_path;  // edges

    enum class Init { Uniform, Explicit, SymmetricPairs };
    Init init = Init::Uniform;
    std::vector<double> init_values;  // explicit opinions, or eta list (may be
                                      // empty for seeded symmetric pairs)

    ModelSpec model;
    std::uint64_t seed = 0;
    StopCriteria stop;
    int stride = 1;
    std::string out_trace;
    std::string out_report;
    std::vector<std::string> checks;  // clusters, layers, limits, complete
};

struct ValidationResult {
    std::optional<ScenarioConfig> config;  // set iff errors is empty
    std::vector<std::string> errors;       // all violations, not just the first
};

ValidationResult validate_config(const std::string& raw_text);

/// Canonical text form; parsing it back yields an equal config and
/// re-serializing is byte-identical.
std::string serialize_config(const ScenarioConfig& cfg);

/// Compiled-in scenarios: minority10, lattice6, complete100sym.
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

/// The influential-minority fixture: a 10-agent graph where {1,2,3,4} is a
/// robust clique and the remaining agents form successive strict-majority
/// layers {5,6,7,8}, {9}, {10}.
Graph minority10_graph();

Graph build_topology(const ScenarioConfig& cfg);
std::vector<double> build_initial_opinions(const ScenarioConfig& cfg,
                                           const Graph& g);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Prediction-vs-simulation comparisons on a recorded trace. The trace must
/// include the initial snapshot; `names` selects which checks run.
std::vector<CheckResult> evaluate_checks(const Graph& g,
                                         const SimulationTrace& trace,
                                         const std::vector<std::string>& names);

struct ScenarioOutcome {
    SimulationTrace trace;
    std::vector<CheckResult> checks;
    nlohmann::json report;
    int exit_code = 0;  // 0 pass, 2 prediction mismatch
};

/// Runs the scenario, writes the trace CSV and report document when paths are
/// configured, and evaluates the enabled checks. Deterministic given the seed.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

nlohmann::json cluster_report_json(const ClusterReport& report);

}  // namespace coda
