#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "coda/graph.hpp"

namespace coda {

/// Uniform double in [0,1) built from the top 53 bits of the generator, so
/// streams are identical across standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform in (lo, hi), resampled while any draw lands within 1e-9 of 1/2.
std::vector<double> random_opinions(std::mt19937_64& rng, int n, double lo = 0.0,
                                    double hi = 1.0);

/// Symmetric-pair initial condition: eta_i in (0, 1/2) drawn uniformly, agent
/// i gets 1/2 - eta_i and agent n/2 + i gets 1/2 + eta_i. Requires even n.
std::vector<double> symmetric_pair_opinions(std::mt19937_64& rng, int n);
std::vector<double> symmetric_pair_opinions(const std::vector<double>& etas);

/// Random spanning tree plus independent extra undirected edges.
Graph random_connected_undirected(std::mt19937_64& rng, int n,
                                  double extra_edge_prob = 0.15);

/// Random Hamiltonian cycle plus independent extra directed edges; strongly
/// connected by construction.
Graph random_strongly_connected(std::mt19937_64& rng, int n,
                                double edge_prob = 0.4);

}  // namespace coda
