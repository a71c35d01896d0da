#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coda/graph.hpp"

namespace coda {

/// Quantizer with memory: 0 below 1/2, 1 above, and exactly at 1/2 the action
/// most recently assigned is kept.
int quantize(double p, int prev_action);

/// One synchronous step of the continuous-action model: agents average their
/// influencers' opinions with the state-dependent weight p_i(1-p_i)/n_i.
/// Isolated agents are unchanged.
std::vector<double> coca_step(const Graph& g, const std::vector<double>& p);

struct OpinionState {
    long k = 0;
    std::vector<double> p;
    /// q doubles as the quantizer memory: it is the action most recently
    /// assigned to each agent.
    std::vector<std::uint8_t> q;
};

/// Seed a state at k=0. For quantized models p0 must avoid 1/2 exactly, so the
/// initial action is the quantization of p0 itself. With allow_center=true
/// (continuous-action runs) an exact 1/2 seeds action 1, the quantizer's
/// "otherwise" branch.
OpinionState initial_state(const Graph& g, std::vector<double> p0,
                           bool allow_center = false);

/// One synchronous step of the discrete-action model: each agent with
/// influencers moves toward r_i = n_i^+ / n_i, then re-quantizes.
OpinionState coda_step(const Graph& g, const OpinionState& state);

/// Bayesian odds update: each influencer multiplies agent i's odds by
/// alpha/(1-alpha) when its action is 1, by the inverse when 0. The factors
/// commute, so the result is independent of influencer order.
std::vector<double> martins_step(const Graph& g, const std::vector<double>& p,
                                 const std::vector<std::uint8_t>& q, double alpha);

/// In-place discrete-action step used by the run driver and bulk experiments.
/// `plus` must hold, per agent, the number of influencers with action 1; it is
/// kept consistent across the call. Returns true when any action changed.
bool coda_step_inplace(const Graph& g, std::vector<double>& p,
                       std::vector<std::uint8_t>& q, std::vector<int>& plus);
void recompute_plus_counts(const Graph& g, const std::vector<std::uint8_t>& q,
                           std::vector<int>& plus);

enum class Model { Coca, Coda, Martins };

struct ModelSpec {
    Model model = Model::Coda;
    double alpha = 2.0 / 3.0;  // Martins only, in [1/2, 1)
};

struct StopCriteria {
    long max_steps = 10000;
    double tol_p = 1e-10;   // on max_i |p_i(k+1) - p_i(k)|
    int q_window = 10;      // steps with unchanged actions required to converge
    int osc_window = 6;     // consecutive period-2 alternations required
};

enum class Termination { Converged, OscillatingPeriod2, MaxSteps };

const char* termination_name(Termination t);

/// Per-step invariant monitoring. Violations are collected into the trace, not
/// thrown, so a failing run can still be inspected.
struct InvariantChecks {
    bool closure = false;            // p stays strictly inside (0,1)
    bool trichotomy = false;         // discrete-action three-way step relation
    bool action_step_law = false;    // action kept under non-strict own-side majority
    bool monotone_envelope = false;  // continuous-action min/max monotonicity
    double coca_epsilon = 0.0;       // >0 enables the interaction-weight bounds
    bool contraction = false;        // spread ratio <= beta(epsilon); needs
                                     // strong connectivity and coca_epsilon > 0
};

struct RunOptions {
    StopCriteria stop;
    /// Snapshot recording stride; <= 0 records only the initial and final
    /// states. Stride 1 records every step.
    int record_stride = 1;
    InvariantChecks checks;
};

struct SimulationTrace {
    std::vector<long> recorded_steps;
    std::vector<std::vector<double>> p;
    std::vector<std::vector<std::uint8_t>> q;
    Termination termination = Termination::MaxSteps;
    long steps = 0;
    std::vector<double> final_p;
    std::vector<std::uint8_t> final_q;
    std::vector<std::string> violations;
    long violation_count = 0;
    double max_contraction_ratio = 0.0;  // continuous-action diagnostic
};

double beta_contraction_bound(double epsilon, int n);

SimulationTrace run(const Graph& g, const std::vector<double>& p0,
                    const ModelSpec& model, const RunOptions& opt);

/// CSV with header `k,agent,p,q`, one row per agent per recorded step,
/// agents 1-indexed. Deterministic formatting.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

}  // namespace coda
