#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coda/graph.hpp"

namespace coda {

struct Fraction {
    long num = 0;
    long den = 1;  // reduced, den >= 1
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Fraction&) const = default;
};

/// The rationals k/m with 0 <= k <= m <= n-1: the only possible interior
/// limits of the discrete-action dynamics on a network of n agents.
class EquilibriumSet {
public:
    explicit EquilibriumSet(int n);  // rejects n < 2
    int network_size() const { return n_; }
    const std::vector<Fraction>& values() const { return values_; }
    bool contains(double x, double tol) const;
    /// Closest member and its distance to x.
    Fraction nearest(double x) const;

private:
    int n_;
    std::vector<Fraction> values_;  // sorted ascending, deduplicated
};

/// Bisection on a bracketing interval [lo, hi] with f(lo) and f(hi) of
/// opposite sign; returns the midpoint once the interval shrinks below tol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol);

/// Maximal distance above 1/2 from which an agent facing opposing-majority
/// ratio r = n_i^+/n_i < 1/2 flips to action 0 in one step: the unique root in
/// (0, 1/2) of x^3 + (1/2 - r)x^2 + (3/4)x - (1/2 - r)/4.
double flip_threshold(double r);

/// Radius of the strip around 1/2 inside which opinions end up alternating on
/// a complete graph of even size n with symmetric initial conditions. Enforces
/// the bracket 1/(8(n-1)) < eps* < 1/(6(n-1)).
double oscillation_band(int n);

/// Amplitude of the exact period-2 alternating state on the ring: the unique
/// positive root of 8s^3 + 4s^2 + 14s - 1.
double ring_orbit_sigma();

/// Definition check: all agents in `agents` share one initial action and each
/// has at least as many influencers inside the set as outside.
bool is_robust_cluster(const Graph& g, const std::vector<int>& agents,
                       const std::vector<std::uint8_t>& q0);

struct Cluster {
    std::vector<int> agents;  // sorted, 0-indexed
    int action = 0;
};

struct ClusterReport {
    std::vector<Cluster> clusters;
    std::vector<std::vector<int>> layers;  // A_1 ... A_d, sorted agent lists
    int layer_action = -1;                 // predicted limiting action, -1 if none
    std::vector<int> uncovered;            // agents with no prediction
};

/// For each action value, prune the same-action seed to its unique maximal
/// robust subset (repeatedly drop agents with a strict outside majority), then
/// split into connected components; each component is a robust cluster.
ClusterReport find_maximal_robust_clusters(const Graph& g,
                                           const std::vector<std::uint8_t>& q0);

/// Layer construction: A_{h+1} collects the agents outside earlier layers with
/// a strict majority of influencers in A_h. Every layer member is predicted to
/// eventually adopt a1's action. Rejects a1 that is not a robust cluster.
ClusterReport diffusion_layers(const Graph& g, const std::vector<int>& a1,
                               const std::vector<std::uint8_t>& q0);

enum class CompletePrediction { AllToZero, AllToOne, SymmetricOscillationCandidate };

const char* complete_prediction_name(CompletePrediction p);

/// Majority forecast on a complete graph: the strict-majority action wins; a
/// tie is reported as an oscillation candidate and deferred to simulation.
CompletePrediction predict_complete_graph(const Graph& g,
                                          const std::vector<std::uint8_t>& q0);

}  // namespace coda
