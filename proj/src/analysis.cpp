#include "coda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace coda {

EquilibriumSet::EquilibriumSet(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("equilibrium set requires n >= 2");
    for (long m = 1; m <= n - 1; ++m) {
        for (long k = 0; k <= m; ++k) {
            const long d = std::gcd(k, m);
            values_.push_back({k / std::max(d, 1L), m / std::max(d, 1L)});
        }
    }
    std::sort(values_.begin(), values_.end(), [](const Fraction& a, const Fraction& b) {
        return a.num * b.den < b.num * a.den;
    });
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

bool EquilibriumSet::contains(double x, double tol) const {
    Fraction f = nearest(x);
    return std::abs(f.value() - x) <= tol;
}

Fraction EquilibriumSet::nearest(double x) const {
    Fraction best = values_.front();
    double best_d = std::abs(best.value() - x);
    for (const Fraction& f : values_) {
        const double d = std::abs(f.value() - x);
        if (d < best_d) {
            best = f;
            best_d = d;
        }
    }
    return best;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::invalid_argument("bisection bracket does not change sign");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double flip_threshold(double r) {
    if (!(r >= 0.0 && r < 0.5))
        throw std::invalid_argument("flip threshold requires r in [0, 1/2)");
    const double c = 0.5 - r;
    auto cubic = [c](double x) { return x * x * x + c * x * x + 0.75 * x - 0.25 * c; };
    // cubic(0) = -c/4 < 0 and cubic(1/2) = 1/2 > 0; strictly increasing on x >= 0.
    return bisect_root(cubic, 0.0, 0.5, 1e-12);
}

double oscillation_band(int n) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("oscillation band requires even n >= 4");
    const double a = 1.0 / (2.0 * (n - 1));
    auto cubic = [a](double x) {
        return x * x * x + a * x * x + 0.75 * x - 0.25 * a;
    };
    const double eps = bisect_root(cubic, 0.0, 0.5, 1e-14);
    const double lo = 1.0 / (8.0 * (n - 1));
    const double hi = 1.0 / (6.0 * (n - 1));
    if (!(eps > lo && eps < hi))
        throw std::logic_error("oscillation band fell outside its analytic bracket");
    return eps;
}

double ring_orbit_sigma() {
    // Expansion of the orbit identity
    //   1/2 - s = 1/2 + s - (1/2 + s)^2 (1/2 - s).
    auto cubic = [](double s) { return 8 * s * s * s + 4 * s * s + 14 * s - 1; };
    return bisect_root(cubic, 0.0, 0.5, 1e-14);
}

namespace {

std::vector<char> membership_mask(int n, const std::vector<int>& agents) {
    std::vector<char> in(n, 0);
    for (int a : agents) {
        if (a < 0 || a >= n) throw std::invalid_argument("agent index out of range");
        in[a] = 1;
    }
    return in;
}

// |N_i inside| - |N_i outside| for the set given by mask.
int inside_advantage(const Graph& g, const std::vector<char>& in, int i) {
    int inside = 0;
    for (int j : g.influencers(i))
        if (in[j]) ++inside;
    return 2 * inside - g.degree(i);
}

// Connected components of the subgraph induced on `mask`, edges taken in the
// undirected sense.
std::vector<std::vector<int>> components(const Graph& g, const std::vector<char>& mask) {
    const int n = g.size();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        for (int j : g.influencers(i)) {
            if (mask[j]) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (!mask[s] || seen[s]) continue;
        std::vector<int> comp;
        std::vector<int> stack = {s};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace

bool is_robust_cluster(const Graph& g, const std::vector<int>& agents,
                       const std::vector<std::uint8_t>& q0) {
    if (agents.empty()) throw std::invalid_argument("cluster must be non-empty");
    auto in = membership_mask(g.size(), agents);
    const int action = q0[agents.front()];
    for (int i : agents) {
        if (q0[i] != action) return false;
        if (inside_advantage(g, in, i) < 0) return false;
    }
    return true;
}

ClusterReport find_maximal_robust_clusters(const Graph& g,
                                           const std::vector<std::uint8_t>& q0) {
    const int n = g.size();
    ClusterReport report;
    std::vector<char> covered(n, 0);
    for (int action = 0; action <= 1; ++action) {
        std::vector<char> in(n, 0);
        for (int i = 0; i < n; ++i) in[i] = q0[i] == action;
        // Monotone pruning: dropping an agent can only worsen the balance of
        // the remaining ones, so the fixed point is the unique maximal robust
        // subset of the seed.
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<int> drop;
            for (int i = 0; i < n; ++i)
                if (in[i] && inside_advantage(g, in, i) < 0) drop.push_back(i);
            for (int i : drop) {
                in[i] = 0;
                changed = true;
            }
        }
        for (auto& comp : components(g, in)) {
            for (int i : comp) covered[i] = 1;
            report.clusters.push_back({std::move(comp), action});
        }
    }
    for (int i = 0; i < n; ++i)
        if (!covered[i]) report.uncovered.push_back(i);
    return report;
}

ClusterReport diffusion_layers(const Graph& g, const std::vector<int>& a1,
                               const std::vector<std::uint8_t>& q0) {
    if (!is_robust_cluster(g, a1, q0))
        throw std::invalid_argument("A1 is not a robust polarized cluster");
    const int n = g.size();
    ClusterReport report;
    report.layer_action = q0[a1.front()];

    std::vector<char> in_union = membership_mask(n, a1);
    std::vector<char> prev_layer = in_union;
    std::vector<int> layer = a1;
    std::sort(layer.begin(), layer.end());
    report.layers.push_back(layer);

    while (true) {
        std::vector<int> next;
        for (int i = 0; i < n; ++i) {
            if (in_union[i]) continue;
            if (inside_advantage(g, prev_layer, i) > 0) next.push_back(i);
        }
        if (next.empty()) break;
        std::fill(prev_layer.begin(), prev_layer.end(), 0);
        for (int i : next) {
            in_union[i] = 1;
            prev_layer[i] = 1;
        }
        report.layers.push_back(std::move(next));
    }
    for (int i = 0; i < n; ++i)
        if (!in_union[i]) report.uncovered.push_back(i);
    return report;
}

const char* complete_prediction_name(CompletePrediction p) {
    switch (p) {
        case CompletePrediction::AllToZero: return "all_to_0";
        case CompletePrediction::AllToOne: return "all_to_1";
        case CompletePrediction::SymmetricOscillationCandidate:
            return "symmetric_oscillation_candidate";
    }
    return "unknown";
}

CompletePrediction predict_complete_graph(const Graph& g,
                                          const std::vector<std::uint8_t>& q0) {
    if (g != Graph::complete(g.size()))
        throw std::invalid_argument("prediction requires the complete graph");
    const long plus = std::count(q0.begin(), q0.end(), std::uint8_t{1});
    const long minus = static_cast<long>(q0.size()) - plus;
    if (minus > plus) return CompletePrediction::AllToZero;
    if (plus > minus) return CompletePrediction::AllToOne;
    return CompletePrediction::SymmetricOscillationCandidate;
}

}  // namespace coda
