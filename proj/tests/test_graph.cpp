#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "coda/generators.hpp"
#include "coda/graph.hpp"

using coda::Graph;

namespace {

void require_undirected_involution(const Graph& g) {
    for (int i = 0; i < g.size(); ++i)
        for (int j : g.influencers(i)) {
            const auto& back = g.influencers(j);
            REQUIRE(std::find(back.begin(), back.end(), i) != back.end());
        }
}

void require_basic_invariants(const Graph& g) {
    for (int i = 0; i < g.size(); ++i) {
        const auto& nb = g.influencers(i);
        REQUIRE(std::is_sorted(nb.begin(), nb.end()));
        REQUIRE(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
        REQUIRE(std::find(nb.begin(), nb.end(), i) == nb.end());
        REQUIRE(g.degree(i) <= g.size() - 1);
    }
}

}  // namespace

TEST_CASE("complete graph") {
    CHECK_THROWS_AS(Graph::complete(1), std::invalid_argument);

    const Graph g3 = Graph::complete(3);
    for (int i = 0; i < 3; ++i) CHECK(g3.degree(i) == 2);

    const Graph g2 = Graph::complete(2);
    CHECK(g2.influencers(0) == std::vector<int>{1});
    CHECK(g2.influencers(1) == std::vector<int>{0});

    const Graph g100 = Graph::complete(100);
    for (int i = 0; i < 100; ++i) CHECK(g100.degree(i) == 99);
    require_basic_invariants(g100);
    require_undirected_involution(g100);
    CHECK(g100.strongly_connected());
}

TEST_CASE("ring graph") {
    CHECK_THROWS_AS(Graph::ring(2), std::invalid_argument);

    // Agent 1 of a 4-ring (0-indexed agent 0) sees agents 4 and 2.
    const Graph g4 = Graph::ring(4);
    CHECK(g4.influencers(0) == std::vector<int>{1, 3});

    const Graph g3 = Graph::ring(3);
    CHECK(g3.influencers(1) == std::vector<int>{0, 2});

    const Graph g6 = Graph::ring(6);
    for (int i = 0; i < 6; ++i) CHECK(g6.degree(i) == 2);
    require_undirected_involution(g6);
}

TEST_CASE("lattice graph") {
    CHECK_THROWS_AS(Graph::lattice(1, 5), std::invalid_argument);
    CHECK_THROWS_AS(Graph::lattice(5, 1), std::invalid_argument);

    const Graph g6 = Graph::lattice(6, 6);
    CHECK(g6.size() == 36);
    CHECK(g6.degree(0) == 2);        // corner
    CHECK(g6.degree(1) == 3);        // edge
    CHECK(g6.degree(7) == 4);        // interior
    require_basic_invariants(g6);
    require_undirected_involution(g6);

    const Graph g2 = Graph::lattice(2, 2);
    for (int i = 0; i < 4; ++i) CHECK(g2.degree(i) == 2);

    CHECK(Graph::lattice(50, 50).size() == 2500);
}

TEST_CASE("from_edges") {
    const Graph d = Graph::from_edges(2, {{0, 1}}, true);
    CHECK(d.influencers(1) == std::vector<int>{0});
    CHECK(d.influencers(0).empty());

    const Graph u = Graph::from_edges(3, {{0, 1}, {1, 2}}, false);
    CHECK(u.influencers(1) == std::vector<int>{0, 2});

    CHECK_THROWS_WITH_AS(Graph::from_edges(3, {{0, 0}}, false),
                         "self-loop at agent 1", std::invalid_argument);
    CHECK_THROWS_AS(Graph::from_edges(3, {{0, 5}}, true), std::invalid_argument);

    // Duplicates collapse.
    const Graph dup = Graph::from_edges(2, {{0, 1}, {0, 1}}, true);
    CHECK(dup.degree(1) == 1);
}

TEST_CASE("constructor cross-checks") {
    std::vector<std::pair<int, int>> all_pairs;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) all_pairs.emplace_back(a, b);
    CHECK(Graph::complete(5) == Graph::from_edges(5, all_pairs, false));

    std::vector<std::pair<int, int>> cycle;
    for (int i = 0; i < 7; ++i) cycle.emplace_back(i, (i + 1) % 7);
    CHECK(Graph::ring(7) == Graph::from_edges(7, cycle, false));
}

TEST_CASE("degree accounting") {
    const Graph d = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}, true);
    CHECK(d.total_influence_entries() == 3);
    const Graph u = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}}, false);
    CHECK(u.total_influence_entries() == 6);
}

TEST_CASE("edge list text format") {
    std::istringstream in(
        "# minority fixture fragment\n"
        "n 3 directed 0\n"
        "1 2\n"
        "2 3  # tail comment\n");
    const Graph g = Graph::parse_edge_list(in);
    CHECK(g.size() == 3);
    CHECK_FALSE(g.directed());
    CHECK(g.influencers(1) == std::vector<int>{0, 2});

    std::istringstream bad("n 3 directed 2\n");
    CHECK_THROWS_AS(Graph::parse_edge_list(bad), std::invalid_argument);
    std::istringstream bad2("n 3 directed 1\n1 2 3\n");
    CHECK_THROWS_AS(Graph::parse_edge_list(bad2), std::invalid_argument);
}

TEST_CASE("random generators produce valid graphs") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 20);
        const Graph u = coda::random_connected_undirected(rng, n);
        require_basic_invariants(u);
        require_undirected_involution(u);
        CHECK(u.strongly_connected());

        const Graph d = coda::random_strongly_connected(rng, n);
        require_basic_invariants(d);
        CHECK(d.strongly_connected());
        for (int i = 0; i < n; ++i) CHECK(d.degree(i) >= 1);
    }
}
