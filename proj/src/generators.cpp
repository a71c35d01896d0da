#include "coda/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coda {

std::vector<double> random_opinions(std::mt19937_64& rng, int n, double lo,
                                    double hi) {
    std::vector<double> p(n);
    for (double& v : p) {
        do {
            v = lo + (hi - lo) * uniform01(rng);
        } while (v <= lo || v >= hi || std::abs(v - 0.5) < 1e-9);
    }
    return p;
}

std::vector<double> symmetric_pair_opinions(std::mt19937_64& rng, int n) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("symmetric pairs require even n >= 2");
    std::vector<double> etas(n / 2);
    for (double& e : etas) {
        do {
            e = 0.5 * uniform01(rng);
        } while (e < 1e-9 || e >= 0.5);
    }
    return symmetric_pair_opinions(etas);
}

std::vector<double> symmetric_pair_opinions(const std::vector<double>& etas) {
    const int half = static_cast<int>(etas.size());
    std::vector<double> p(2 * half);
    for (int i = 0; i < half; ++i) {
        if (!(etas[i] > 0.0 && etas[i] < 0.5))
            throw std::invalid_argument("eta values must lie in (0, 1/2)");
        p[i] = 0.5 - etas[i];
        p[half + i] = 0.5 + etas[i];
    }
    return p;
}

Graph random_connected_undirected(std::mt19937_64& rng, int n,
                                  double extra_edge_prob) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);

    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) {
        const int parent = order[rng() % static_cast<std::uint64_t>(i)];
        edges.emplace_back(parent, order[i]);
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (uniform01(rng) < extra_edge_prob) edges.emplace_back(a, b);
    return Graph::from_edges(n, edges, false);
}

Graph random_strongly_connected(std::mt19937_64& rng, int n, double edge_prob) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(order[i], order[(i + 1) % n]);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && uniform01(rng) < edge_prob) edges.emplace_back(a, b);
    return Graph::from_edges(n, edges, true);
}

}  // namespace coda
