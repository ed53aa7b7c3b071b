#pragma once

// Streaming stability monitor for weight-update state-space steps.
//
// Consumes one StateSpaceStep per learner update and maintains:
//   - per-step indicators: spectral radius of A(k), Frobenius norm, spectral
//     norm (when cheap enough or requested),
//   - a sliding-window product ||A(k) A(k-1) ... A(k-p+1)|| evaluated every
//     eval_stride steps once p matrices have been seen,
//   - running suprema M_A, M_B, L_u of the step norms and input norms,
//   - a running bound on ||w(k)|| certified either from M_A < 1 or from a
//     contractive window product, and a two-term decay/input bound split.
//
// Alarms: a window product above threshold alarms immediately; a per-step
// spectral radius above threshold alarms only after p consecutive
// exceedances (per-step norms of rank-one-update matrices legitimately
// hover near or above 1, so a single exceedance is not evidence);
// a divergence signal from the learner always alarms.

#include "iplna/linalg.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>

namespace iplna {

struct StateSpaceStep;  // learners.hpp

enum class NormKind { frobenius, spectral };

struct MonitorConfig {
    std::size_t window_p = 50;     // sliding-window length
    std::size_t eval_stride = 1;   // evaluate the window product every this many steps
    NormKind norm_kind = NormKind::frobenius;
    double alarm_threshold = 1.05; // alarm when an indicator exceeds this (>= 1)
    std::size_t history_cap = 100000;

    void validate() const;
};

enum class AlarmReason { none, per_step_norm, window_product, divergence };

std::string to_string(AlarmReason r);

// Two-term state bound: ||state|| <= beta_term + gamma_term, where beta_term
// decays with the product of step norms and gamma_term collects the input
// contribution. Accumulated from per-step Frobenius norms so it is always a
// true upper bound.
struct IssBound {
    double beta_term = 0.0;
    double gamma_term = 0.0;

    double total() const { return beta_term + gamma_term; }
};

struct StabilityReport {
    long k = 0;                 // 1-based count of observed steps
    double w_norm = 0.0;        // norm of the state after this step
    double rho_analytic = 0.0;  // closed-form rank-1 value where available, else estimate
    double lmd_frob = 0.0;
    std::optional<double> lmd_spec;     // computed when dim <= 64 or norm_kind = spectral
    std::optional<double> window_norm;  // present only on full-window eval strides
    double running_MA = 0.0;
    double running_MB = 0.0;
    double running_Lu = 0.0;
    std::optional<double> bibs_bound;   // w0_norm + MB*Lu/(1-q), absent until q < 1 certified
    IssBound iss;
    bool alarm = false;
    AlarmReason alarm_reason = AlarmReason::none;
};

// Norm (per cfg.norm_kind) of the chronological window's matrix product,
// newest matrix applied last. A single-matrix window reduces to the per-step
// norm.
double window_condition(const MonitorConfig& cfg, std::span<const Mat> window);

// w0_norm + MB*Lu/(1-MA) when MA < 1; absent otherwise.
std::optional<double> bibs_bound(double w0_norm, double MA, double MB, double Lu);

// Closed-form evaluation of the two-term bound from explicit per-step norm
// lists (equal length, oldest first):
//   beta  = (prod a_i) * w0_norm
//   gamma = u_sup * sum_i (prod_{j>i} a_j) * b_i
IssBound iss_bounds(double w0_norm, std::span<const double> per_step_A_norms,
                    std::span<const double> per_step_B_norms, double u_sup);

class StabilityMonitor {
public:
    StabilityMonitor() = default;  // uninitialized; observe() rejects use
    StabilityMonitor(MonitorConfig cfg, double w0_norm);

    // Ingest the decomposition of one update and the post-update state norm.
    // `diverged` marks a step whose state exceeded the caller's cap; the
    // report then alarms with the divergence reason.
    const StabilityReport& observe(const StateSpaceStep& ss, double w_norm,
                                   bool diverged = false);

    // Record a terminal report for a step whose update could not be computed
    // (the learner raised a divergence error). Indicator values are carried
    // over from the previous report.
    const StabilityReport& flag_divergence(double w_norm);

    const std::deque<StabilityReport>& history() const { return history_; }
    long steps() const { return k_; }
    const MonitorConfig& config() const { return cfg_; }
    double initial_state_norm() const { return w0_norm_; }

private:
    const StabilityReport& push(StabilityReport r);

    MonitorConfig cfg_;
    double w0_norm_ = 0.0;
    bool initialized_ = false;

    long k_ = 0;
    std::deque<Mat> ring_;          // last <= window_p step matrices, oldest first
    std::size_t exceed_run_ = 0;    // consecutive steps with rho above threshold
    double ma_ = 0.0;               // sup per-step norm (cfg.norm_kind)
    double mb_ = 0.0;               // sup ||B(k)|| (cfg.norm_kind)
    double lu_ = 0.0;               // sup ||u(k)||
    double iss_prod_ = 1.0;         // running prod of Frobenius step norms
    double iss_sum_ = 0.0;          // running sum for the input term
    double window_sup_ = 0.0;       // sup of evaluated window product norms
    bool window_seen_ = false;
    std::deque<StabilityReport> history_;
};

// One JSON object per report, fixed field order:
// {"k":...,"e":...,"w_norm":...,"rho":...,"frob":...,"spec":...,
//  "window_norm":...,"MA":...,"MB":...,"Lu":...,"bibs_bound":...,
//  "alarm":...,"alarm_reason":...}
// Absent optionals and the reason on non-alarm lines serialize as null.
std::string to_json_line(const StabilityReport& r, double e);

}  // namespace iplna
