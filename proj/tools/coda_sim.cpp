#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "coda/generators.hpp"
#include "coda/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMismatch = 2;

std::string with_seed_suffix(const std::string& path, std::uint64_t seed) {
    if (path.empty()) return path;
    const std::string suffix = "_seed" + std::to_string(seed);
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int run_one(const coda::ScenarioConfig& cfg, bool quiet) {
    const auto outcome = coda::run_scenario(cfg);
    if (!quiet) {
        std::cout << "termination: "
                  << coda::termination_name(outcome.trace.termination)
                  << " after " << outcome.trace.steps << " step(s)\n";
        for (const auto& c : outcome.checks)
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": "
                      << c.detail << '\n';
        for (const auto& v : outcome.trace.violations)
            std::cout << "[FAIL] invariant: " << v << '\n';
    }
    return outcome.exit_code;
}

int cmd_run(const std::string& config_path, const std::string& builtin,
            CLI::App* app, int batch) {
    coda::ScenarioConfig cfg;
    if (!builtin.empty()) {
        cfg = coda::builtin_scenario(builtin);
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config `" << config_path << "`\n";
            return kExitError;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        auto validated = coda::validate_config(buf.str());
        if (!validated.config) {
            for (const auto& e : validated.errors)
                std::cerr << "config error: " << e << '\n';
            return kExitError;
        }
        cfg = *validated.config;
    } else {
        std::cerr << "error: give a config file or --builtin NAME\n";
        return kExitError;
    }

    // Flag overrides on top of the file/builtin values.
    if (app->count("--seed")) cfg.seed = app->get_option("--seed")->as<std::uint64_t>();
    if (app->count("--steps")) cfg.stop.max_steps = app->get_option("--steps")->as<long>();
    if (app->count("--stride")) cfg.stride = app->get_option("--stride")->as<int>();
    if (app->count("--out-trace"))
        cfg.out_trace = app->get_option("--out-trace")->as<std::string>();
    if (app->count("--out-report"))
        cfg.out_report = app->get_option("--out-report")->as<std::string>();
    if (app->count("--topology") || app->count("--model")) {
        // Route the flag values through the config parser so overrides get the
        // same diagnostics as file values.
        std::istringstream current(coda::serialize_config(cfg));
        std::string topo_line, model_line;
        std::getline(current, topo_line);
        std::getline(current, model_line);
        if (app->count("--topology"))
            topo_line = "topology = " + app->get_option("--topology")->as<std::string>();
        if (app->count("--model"))
            model_line = "model = " + app->get_option("--model")->as<std::string>();
        auto validated = coda::validate_config(topo_line + "\n" + model_line + "\n");
        if (!validated.config) {
            for (const auto& e : validated.errors)
                std::cerr << "flag error: " << e << '\n';
            return kExitError;
        }
        if (app->count("--topology")) {
            cfg.topology = validated.config->topology;
            cfg.n = validated.config->n;
            cfg.rows = validated.config->rows;
            cfg.cols = validated.config->cols;
            cfg.edges_path = validated.config->edges_path;
        }
        if (app->count("--model")) cfg.model = validated.config->model;
    }
    if (app->count("--check")) cfg.checks = {"clusters", "layers", "limits", "complete"};

    if (batch <= 1) return run_one(cfg, false);

    // Independent seeds, independent output files, no shared mutable state.
    std::atomic<int> worst{kExitOk};
    std::vector<std::thread> workers;
    for (int b = 0; b < batch; ++b) {
        coda::ScenarioConfig sub = cfg;
        sub.seed = cfg.seed + static_cast<std::uint64_t>(b);
        sub.out_trace = with_seed_suffix(cfg.out_trace, sub.seed);
        sub.out_report = with_seed_suffix(cfg.out_report, sub.seed);
        workers.emplace_back([sub, &worst]() {
            int code = kExitError;
            try {
                code = run_one(sub, true);
            } catch (const std::exception& e) {
                std::cerr << "seed " << sub.seed << ": error: " << e.what() << '\n';
            }
            int cur = worst.load();
            while (code > cur && !worst.compare_exchange_weak(cur, code)) {
            }
        });
    }
    for (auto& w : workers) w.join();
    std::cout << "batch of " << batch << " finished, worst exit code "
              << worst.load() << '\n';
    return worst.load();
}

int cmd_fuzz(std::uint64_t seed, int runs, int max_n, long steps) {
    int failures = 0;
    int converged = 0;
    const double limit_tol = 1e-6;
    for (int runi = 0; runi < runs; ++runi) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(runi));
        const int n = 4 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 3));
        const coda::Graph g = coda::random_connected_undirected(rng, n);
        const auto p0 = coda::random_opinions(rng, n);

        coda::RunOptions opt;
        opt.stop.max_steps = steps;
        opt.stop.tol_p = 5e-13;
        opt.record_stride = 0;
        opt.checks.closure = true;
        opt.checks.trichotomy = true;
        opt.checks.action_step_law = true;
        const auto trace = coda::run(g, p0, {coda::Model::Coda}, opt);

        bool ok = trace.violation_count == 0;
        for (const auto& v : trace.violations)
            std::cerr << "seed " << seed + runi << ": " << v << '\n';
        if (trace.termination == coda::Termination::Converged) {
            ++converged;
            const coda::EquilibriumSet set(n);
            for (int i = 0; i < n; ++i)
                if (!set.contains(trace.final_p[i], limit_tol)) {
                    std::cerr << "seed " << seed + runi << ": agent " << i + 1
                              << " limit " << trace.final_p[i]
                              << " not near the admissible rational set\n";
                    ok = false;
                }
        }
        if (!ok) ++failures;
    }
    std::cout << "fuzz: " << runs << " run(s), " << converged << " converged, "
              << failures << " failure(s)\n";
    return failures == 0 ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis harness for quantized-action opinion dynamics"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run one scenario (or a seed batch)");
    std::string config_path, builtin;
    int batch = 1;
    run_cmd->add_option("config", config_path, "scenario config file (key = value)");
    run_cmd->add_option("--builtin", builtin, "compiled-in scenario name");
    run_cmd->add_option("--seed", "RNG seed override");
    run_cmd->add_option("--model", "model override: coca | coda | martins:ALPHA");
    run_cmd->add_option("--topology",
                        "topology override: complete:N | ring:N | lattice:RxC | edges:PATH");
    run_cmd->add_option("--steps", "maximum step count override");
    run_cmd->add_option("--stride", "trace recording stride override");
    run_cmd->add_option("--out-trace", "trace CSV path override");
    run_cmd->add_option("--out-report", "report JSON path override");
    run_cmd->add_flag("--check", "enable all prediction checks");
    run_cmd->add_option("--batch", batch, "run this many consecutive seeds concurrently");

    auto* fuzz_cmd = app.add_subcommand(
        "fuzz", "random graphs and initializations with invariant checking");
    std::uint64_t fuzz_seed = 1;
    int fuzz_runs = 100;
    int fuzz_max_n = 30;
    long fuzz_steps = 4000000;
    fuzz_cmd->add_option("--seed", fuzz_seed, "base seed");
    fuzz_cmd->add_option("--runs", fuzz_runs, "number of runs");
    fuzz_cmd->add_option("--max-n", fuzz_max_n, "largest network size");
    fuzz_cmd->add_option("--steps", fuzz_steps, "maximum steps per run");

    auto* validate_cmd =
        app.add_subcommand("validate", "parse a config and report every violation");
    std::string validate_path;
    validate_cmd->add_option("config", validate_path, "scenario config file")->required();

    auto* show_cmd = app.add_subcommand("show", "print a builtin scenario config");
    std::string show_name;
    show_cmd->add_option("name", show_name, "builtin scenario name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, builtin, run_cmd, batch);
        if (fuzz_cmd->parsed())
            return cmd_fuzz(fuzz_seed, fuzz_runs, fuzz_max_n, fuzz_steps);
        if (validate_cmd->parsed()) {
            std::ifstream in(validate_path);
            if (!in) {
                std::cerr << "error: cannot open `" << validate_path << "`\n";
                return kExitError;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            auto validated = coda::validate_config(buf.str());
            if (!validated.config) {
                for (const auto& e : validated.errors)
                    std::cerr << "config error: " << e << '\n';
                return kExitError;
            }
            std::cout << coda::serialize_config(*validated.config);
            return kExitOk;
        }
        if (show_cmd->parsed()) {
            std::cout << coda::serialize_config(coda::builtin_scenario(show_name));
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
