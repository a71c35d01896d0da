#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coda/scenario.hpp"

using namespace coda;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("minimal config") {
        const auto v = validate_config("topology = ring 5\nmodel = coda\n");
        REQUIRE(v.errors.empty());
        CHECK(v.config->topology == ScenarioConfig::Topology::Ring);
        CHECK(v.config->n == 5);
        CHECK(v.config->model.model == Model::Coda);
        CHECK(v.config->init == ScenarioConfig::Init::Uniform);
    }
    SUBCASE("all violations are reported, not just the first") {
        const auto v = validate_config(
            "topology = ring 1\n"
            "model = martins 0.3\n"
            "steps = 0\n"
            "bogus = 1\n");
        CHECK(v.errors.size() == 4);
        CHECK_FALSE(v.config.has_value());
    }
    SUBCASE("quantized models reject an initial 1/2") {
        const auto v = validate_config(
            "topology = complete 3\n"
            "model = coda\n"
            "init = explicit 0.2,0.5,0.8\n");
        REQUIRE(v.errors.size() == 1);
        CHECK(v.errors[0].find("1/2") != std::string::npos);

        const auto ok = validate_config(
            "topology = complete 3\n"
            "model = coca\n"
            "init = explicit 0.2,0.5,0.8\n");
        CHECK(ok.errors.empty());
    }
    SUBCASE("symmetric pairs require even n") {
        const auto v = validate_config(
            "topology = complete 5\n"
            "model = coda\n"
            "init = symmetric-pairs\n");
        REQUIRE(v.errors.size() == 1);
        CHECK(v.errors[0].find("even") != std::string::npos);
    }
    SUBCASE("comments, duplicates, colon form") {
        const auto v = validate_config(
            "# a comment\n"
            "topology = complete:6\n"
            "model = martins:0.7\n"
            "seed = 3\n"
            "seed = 4\n");
        REQUIRE(v.errors.size() == 1);
        CHECK(v.errors[0].find("duplicate") != std::string::npos);
    }
}

TEST_CASE("config echo round-trips byte-identically") {
    const auto v = validate_config(
        "topology = lattice 3x4\n"
        "model = coda\n"
        "init = explicit 0.25,0.75,0.25,0.75,0.25,0.75,0.25,0.75,0.25,0.75,0.25,0.75\n"
        "seed = 9\n"
        "checks = clusters,limits\n");
    REQUIRE(v.errors.empty());
    const std::string echo = serialize_config(*v.config);
    const auto reparsed = validate_config(echo);
    REQUIRE(reparsed.errors.empty());
    CHECK(serialize_config(*reparsed.config) == echo);

    // A config already in canonical form is reproduced exactly.
    const std::string canonical = serialize_config(builtin_scenario("complete100sym"));
    const auto parsed = validate_config(canonical);
    REQUIRE(parsed.errors.empty());
    CHECK(serialize_config(*parsed.config) == canonical);
}

TEST_CASE("builtin scenarios") {
    for (const auto& name : builtin_scenario_names()) CHECK_NOTHROW(builtin_scenario(name));
    CHECK_THROWS_AS(builtin_scenario("nope"), std::invalid_argument);

    // The minority fixture satisfies the layer hypotheses it was built for.
    const Graph g = minority10_graph();
    CHECK(g.size() == 10);
    const auto cfg = builtin_scenario("minority10");
    const auto p0 = build_initial_opinions(cfg, g);
    std::vector<std::uint8_t> q0(10);
    for (int i = 0; i < 10; ++i) q0[i] = p0[i] < 0.5 ? 0 : 1;
    const auto clusters = find_maximal_robust_clusters(g, q0);
    REQUIRE(clusters.clusters.size() == 1);
    CHECK(clusters.clusters[0].agents == std::vector<int>{0, 1, 2, 3});
    CHECK(clusters.clusters[0].action == 0);
}

TEST_CASE("initial opinion construction") {
    const auto base = validate_config("topology = complete 6\nmodel = coda\n");
    REQUIRE(base.errors.empty());
    const Graph g = build_topology(*base.config);

    SUBCASE("uniform draws avoid 1/2 and are seed-deterministic") {
        ScenarioConfig cfg = *base.config;
        cfg.seed = 123;
        const auto a = build_initial_opinions(cfg, g);
        const auto b = build_initial_opinions(cfg, g);
        CHECK(a == b);
        for (double p : a) {
            CHECK(p > 0.0);
            CHECK(p < 1.0);
            CHECK(std::abs(p - 0.5) >= 1e-9);
        }
    }
    SUBCASE("symmetric pairs mirror around 1/2") {
        ScenarioConfig cfg = *base.config;
        cfg.init = ScenarioConfig::Init::SymmetricPairs;
        cfg.init_values = {0.1, 0.2, 0.3};
        const auto p = build_initial_opinions(cfg, g);
        for (int i = 0; i < 3; ++i)
            CHECK(p[i] + p[3 + i] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("scenario execution and artifacts") {
    TempFile trace_a("scenario_trace_a.csv");
    TempFile trace_b("scenario_trace_b.csv");
    TempFile report_a("scenario_report_a.json");

    auto v = validate_config(
        "topology = complete 5\n"
        "model = coda\n"
        "init = uniform\n"
        "seed = 21\n"
        "steps = 3000000\n"
        "tol_p = 5e-13\n"
        "stride = 100\n"
        "checks = clusters,layers,limits,complete\n");
    REQUIRE(v.errors.empty());
    ScenarioConfig cfg = *v.config;
    cfg.out_trace = trace_a.path;
    cfg.out_report = report_a.path;

    const auto outcome = run_scenario(cfg);
    CHECK(outcome.exit_code == 0);
    for (const auto& c : outcome.checks) CHECK(c.pass);
    CHECK(outcome.report["termination"] == "converged");

    // Determinism: same config and seed gives a byte-identical trace.
    cfg.out_trace = trace_b.path;
    cfg.out_report.clear();
    run_scenario(cfg);
    CHECK(slurp(trace_a.path) == slurp(trace_b.path));

    const std::string csv = slurp(trace_a.path);
    CHECK(csv.rfind("k,agent,p,q\n", 0) == 0);
}

TEST_CASE("check evaluation flags a broken cluster") {
    // Hand-built trace on the 2x2 lattice: uniform actions form one robust
    // cluster, then one agent deserts it.
    const Graph g = Graph::lattice(2, 2);
    SimulationTrace trace;
    trace.recorded_steps = {0, 1};
    trace.p = {{0.4, 0.4, 0.4, 0.4}, {0.4, 0.4, 0.4, 0.6}};
    trace.q = {{0, 0, 0, 0}, {0, 0, 0, 1}};
    trace.final_p = trace.p.back();
    trace.final_q = trace.q.back();
    trace.termination = Termination::MaxSteps;
    trace.steps = 1;
    const auto results = evaluate_checks(g, trace, {"clusters"});
    REQUIRE(results.size() == 1);
    CHECK_FALSE(results[0].pass);
}
