#include "coda/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace coda {

namespace {

constexpr double kCheckTol = 1e-12;
constexpr std::size_t kMaxStoredViolations = 20;

void check_opinion_domain(const Graph& g, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != g.size())
        throw std::invalid_argument("opinion vector size does not match agent count");
    for (double v : p)
        if (!(v > 0.0 && v < 1.0))
            throw std::invalid_argument("opinions must lie strictly in (0,1)");
}

double format_clamp_open01(double p) {
    // Keeps saturated odds-ratio updates strictly inside (0,1) in floating
    // point; the exact-arithmetic update never reaches the boundary.
    const double hi = std::nextafter(1.0, 0.0);
    const double lo = std::nextafter(0.0, 1.0);
    return std::clamp(p, lo, hi);
}

}  // namespace

int quantize(double p, int prev_action) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("quantizer input must lie in (0,1)");
    if (p < 0.5) return 0;
    if (p > 0.5) return 1;
    return prev_action;
}

std::vector<double> coca_step(const Graph& g, const std::vector<double>& p) {
    check_opinion_domain(g, p);
    const int n = g.size();
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.influencers(i);
        if (nb.empty()) {
            next[i] = p[i];
            continue;
        }
        double sum = 0.0;
        for (int j : nb) sum += p[j] - p[i];
        next[i] = p[i] + p[i] * (1.0 - p[i]) / static_cast<double>(nb.size()) * sum;
    }
    return next;
}

OpinionState initial_state(const Graph& g, std::vector<double> p0,
                           bool allow_center) {
    check_opinion_domain(g, p0);
    OpinionState s;
    s.k = 0;
    s.q.resize(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) {
        if (!allow_center && p0[i] == 0.5)
            throw std::invalid_argument("initial opinion of agent " +
                                        std::to_string(i + 1) +
                                        " must not equal 1/2");
        s.q[i] = p0[i] < 0.5 ? 0 : 1;
    }
    s.p = std::move(p0);
    return s;
}

void recompute_plus_counts(const Graph& g, const std::vector<std::uint8_t>& q,
                           std::vector<int>& plus) {
    const int n = g.size();
    plus.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        int c = 0;
        for (int j : g.influencers(i)) c += q[j];
        plus[i] = c;
    }
}

bool coda_step_inplace(const Graph& g, std::vector<double>& p,
                       std::vector<std::uint8_t>& q, std::vector<int>& plus) {
    const int n = g.size();
    bool q_changed = false;
    for (int i = 0; i < n; ++i) {
        const int ni = g.degree(i);
        if (ni == 0) continue;
        const double pi = p[i];
        const double r = static_cast<double>(plus[i]) / static_cast<double>(ni);
        const double pn = pi + pi * (1.0 - pi) * (r - pi);
        p[i] = pn;
        const std::uint8_t qn =
            pn < 0.5 ? std::uint8_t{0} : (pn > 0.5 ? std::uint8_t{1} : q[i]);
        if (qn != q[i]) {
            q[i] = qn;
            q_changed = true;
        }
    }
    if (q_changed) recompute_plus_counts(g, q, plus);
    return q_changed;
}

OpinionState coda_step(const Graph& g, const OpinionState& state) {
    check_opinion_domain(g, state.p);
    OpinionState next = state;
    std::vector<int> plus;
    recompute_plus_counts(g, state.q, plus);
    coda_step_inplace(g, next.p, next.q, plus);
    next.k = state.k + 1;
    return next;
}

std::vector<double> martins_step(const Graph& g, const std::vector<double>& p,
                                 const std::vector<std::uint8_t>& q,
                                 double alpha) {
    check_opinion_domain(g, p);
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [1/2, 1)");
    const int n = g.size();
    const double factor = alpha / (1.0 - alpha);
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.influencers(i);
        if (nb.empty()) {
            next[i] = p[i];
            continue;
        }
        int net = 0;  // (#action-1 influencers) - (#action-0 influencers)
        for (int j : nb) net += q[j] ? 1 : -1;
        const double odds = p[i] / (1.0 - p[i]) * std::pow(factor, net);
        next[i] = format_clamp_open01(odds / (1.0 + odds));
    }
    return next;
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::OscillatingPeriod2: return "oscillating_period2";
        case Termination::MaxSteps: return "max_steps";
    }
    return "unknown";
}

double beta_contraction_bound(double epsilon, int n) {
    return 1.0 - std::min(0.75, epsilon * (1.0 - epsilon) / (n - 1));
}

SimulationTrace run(const Graph& g, const std::vector<double>& p0,
                    const ModelSpec& model, const RunOptions& opt) {
    const int n = g.size();
    if (opt.stop.max_steps < 1 || !(opt.stop.tol_p > 0.0) || opt.stop.q_window < 1)
        throw std::invalid_argument("invalid stop criteria");
    const bool quantized = model.model != Model::Coca;
    if (model.model == Model::Martins && !(model.alpha >= 0.5 && model.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in [1/2, 1)");

    OpinionState state = initial_state(g, p0, !quantized);

    SimulationTrace trace;
    auto violate = [&trace](std::string msg) {
        ++trace.violation_count;
        if (trace.violations.size() < kMaxStoredViolations)
            trace.violations.push_back(std::move(msg));
    };
    auto record = [&trace, &state](long k) {
        trace.recorded_steps.push_back(k);
        trace.p.push_back(state.p);
        trace.q.push_back(state.q);
    };
    record(0);

    std::vector<int> plus;
    if (model.model != Model::Coca) recompute_plus_counts(g, state.q, plus);

    std::vector<double> p_old;
    std::vector<std::uint8_t> q_two_ago, q_one_ago;
    double env_max = *std::max_element(state.p.begin(), state.p.end());
    double env_min = *std::min_element(state.p.begin(), state.p.end());
    double spread = env_max - env_min;
    const double beta = opt.checks.coca_epsilon > 0.0 && n >= 2
                            ? beta_contraction_bound(opt.checks.coca_epsilon, n)
                            : 1.0;

    int conv_streak = 0;
    int osc_streak = 0;
    long step = 0;

    for (step = 1; step <= opt.stop.max_steps; ++step) {
        q_two_ago = std::move(q_one_ago);
        q_one_ago = state.q;
        p_old = state.p;
        double delta = 0.0;
        bool q_changed = false;

        if (model.model == Model::Coda) {
            for (int i = 0; i < n; ++i) {
                const int ni = g.degree(i);
                const double pi = state.p[i];
                double pn = pi;
                double r = 0.0;
                if (ni > 0) {
                    r = static_cast<double>(plus[i]) / static_cast<double>(ni);
                    pn = pi + pi * (1.0 - pi) * (r - pi);
                }
                state.p[i] = pn;
                delta = std::max(delta, std::abs(pn - pi));
                if (opt.checks.closure && !(pn > 0.0 && pn < 1.0))
                    violate("closure violated at step " + std::to_string(step) +
                            " agent " + std::to_string(i + 1));
                if (opt.checks.trichotomy && ni > 0) {
                    bool ok;
                    if (std::abs(pi - r) <= kCheckTol)
                        ok = std::abs(pn - pi) <= kCheckTol;
                    else if (pi < r)
                        ok = pn > pi - kCheckTol && pn < r + kCheckTol;
                    else
                        ok = pn < pi + kCheckTol && pn > r - kCheckTol;
                    if (!ok)
                        violate("trichotomy violated at step " +
                                std::to_string(step) + " agent " +
                                std::to_string(i + 1));
                }
                const std::uint8_t qn =
                    pn < 0.5 ? std::uint8_t{0}
                             : (pn > 0.5 ? std::uint8_t{1} : state.q[i]);
                if (opt.checks.action_step_law && ni > 0) {
                    const int minus = ni - plus[i];
                    if ((state.q[i] == 0 && minus >= plus[i] && qn != 0) ||
                        (state.q[i] == 1 && plus[i] >= minus && qn != 1))
                        violate("action step law violated at step " +
                                std::to_string(step) + " agent " +
                                std::to_string(i + 1));
                }
                if (qn != state.q[i]) {
                    state.q[i] = qn;
                    q_changed = true;
                }
            }
            if (q_changed) recompute_plus_counts(g, state.q, plus);
        } else if (model.model == Model::Coca) {
            for (int i = 0; i < n; ++i) {
                const auto& nb = g.influencers(i);
                const double pi = p_old[i];
                double pn = pi;
                if (!nb.empty()) {
                    double sum = 0.0;
                    for (int j : nb) sum += p_old[j] - pi;
                    const double w = pi * (1.0 - pi) / static_cast<double>(nb.size());
                    pn = pi + w * sum;
                    if (opt.checks.coca_epsilon > 0.0) {
                        const double eps = opt.checks.coca_epsilon;
                        const double off_lo = eps * (1.0 - eps) / (n - 1);
                        const double self = 1.0 - pi * (1.0 - pi);
                        if (w < off_lo - kCheckTol || w > 0.25 + kCheckTol ||
                            self < 0.75 - kCheckTol ||
                            self > 1.0 - eps * (1.0 - eps) + kCheckTol)
                            violate("weight bounds violated at step " +
                                    std::to_string(step) + " agent " +
                                    std::to_string(i + 1));
                    }
                }
                state.p[i] = pn;
                delta = std::max(delta, std::abs(pn - pi));
                if (opt.checks.closure && !(pn > 0.0 && pn < 1.0))
                    violate("closure violated at step " + std::to_string(step) +
                            " agent " + std::to_string(i + 1));
                const std::uint8_t qn =
                    pn < 0.5 ? std::uint8_t{0}
                             : (pn > 0.5 ? std::uint8_t{1} : state.q[i]);
                if (qn != state.q[i]) {
                    state.q[i] = qn;
                    q_changed = true;
                }
            }
        } else {  // Martins
            std::vector<double> pn = martins_step(g, state.p, state.q, model.alpha);
            for (int i = 0; i < n; ++i) {
                delta = std::max(delta, std::abs(pn[i] - state.p[i]));
                if (opt.checks.closure && !(pn[i] > 0.0 && pn[i] < 1.0))
                    violate("closure violated at step " + std::to_string(step) +
                            " agent " + std::to_string(i + 1));
                const std::uint8_t qn =
                    pn[i] < 0.5 ? std::uint8_t{0}
                                : (pn[i] > 0.5 ? std::uint8_t{1} : state.q[i]);
                if (qn != state.q[i]) {
                    state.q[i] = qn;
                    q_changed = true;
                }
            }
            state.p = std::move(pn);
        }
        state.k = step;

        const double new_max = *std::max_element(state.p.begin(), state.p.end());
        const double new_min = *std::min_element(state.p.begin(), state.p.end());
        if (opt.checks.monotone_envelope) {
            if (new_max > env_max + kCheckTol || new_min < env_min - kCheckTol)
                violate("monotone envelope violated at step " + std::to_string(step));
        }
        if (opt.checks.contraction && spread > 0.0) {
            const double new_spread = new_max - new_min;
            trace.max_contraction_ratio =
                std::max(trace.max_contraction_ratio, new_spread / spread);
            if (new_spread > beta * spread + kCheckTol)
                violate("contraction bound violated at step " + std::to_string(step));
        }
        env_max = new_max;
        env_min = new_min;
        spread = new_max - new_min;

        // Convergence: small opinion motion with frozen actions, sustained.
        if (delta < opt.stop.tol_p && !q_changed)
            ++conv_streak;
        else
            conv_streak = 0;

        // Period-2 oscillation on the action vector.
        if (q_changed && !q_two_ago.empty() && state.q == q_two_ago)
            ++osc_streak;
        else
            osc_streak = 0;

        const bool converged = conv_streak >= opt.stop.q_window;
        const bool oscillating = osc_streak >= opt.stop.osc_window;
        const bool last = converged || oscillating || step == opt.stop.max_steps;
        if ((opt.record_stride > 0 && step % opt.record_stride == 0 && !last) ||
            last)
            record(step);
        if (converged) {
            trace.termination = Termination::Converged;
            break;
        }
        if (oscillating) {
            trace.termination = Termination::OscillatingPeriod2;
            break;
        }
    }

    trace.steps = std::min(step, opt.stop.max_steps);
    trace.final_p = state.p;
    trace.final_q = state.q;
    return trace;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    out << "k,agent,p,q\n";
    char buf[40];
    for (std::size_t s = 0; s < trace.recorded_steps.size(); ++s) {
        const long k = trace.recorded_steps[s];
        const auto& p = trace.p[s];
        const auto& q = trace.q[s];
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
            out << k << ',' << (i + 1) << ',' << buf << ','
                << static_cast<int>(q[i]) << '\n';
        }
    }
}

}  // namespace coda
