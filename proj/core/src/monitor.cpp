#include "iplna/monitor.hpp"

#include "iplna/learners.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace iplna {

void MonitorConfig::validate() const {
    if (window_p < 1) throw std::invalid_argument("monitor config: window_p must be >= 1");
    if (eval_stride < 1) throw std::invalid_argument("monitor config: eval_stride must be >= 1");
    if (!(alarm_threshold >= 1.0))
        throw std::invalid_argument("monitor config: alarm_threshold must be >= 1");
    if (history_cap < 1) throw std::invalid_argument("monitor config: history_cap must be >= 1");
}

std::string to_string(AlarmReason r) {
    switch (r) {
        case AlarmReason::none: return "none";
        case AlarmReason::per_step_norm: return "per_step_norm";
        case AlarmReason::window_product: return "window_product";
        case AlarmReason::divergence: return "divergence";
    }
    throw std::logic_error("to_string: unknown alarm reason");
}

double window_condition(const MonitorConfig& cfg, std::span<const Mat> window) {
    const Mat prod = window_product(window);
    return cfg.norm_kind == NormKind::frobenius ? frobenius_norm(prod)
                                                : spectral_norm_est(prod).value;
}

std::optional<double> bibs_bound(double w0_norm, double MA, double MB, double Lu) {
    if (w0_norm < 0.0 || MA < 0.0 || MB < 0.0 || Lu < 0.0)
        throw std::invalid_argument("bibs_bound: inputs must be nonnegative");
    if (MA >= 1.0) return std::nullopt;
    return w0_norm + MB * Lu / (1.0 - MA);
}

IssBound iss_bounds(double w0_norm, std::span<const double> per_step_A_norms,
                    std::span<const double> per_step_B_norms, double u_sup) {
    if (per_step_A_norms.size() != per_step_B_norms.size())
        throw std::invalid_argument("iss_bounds: norm lists must have equal length");
    if (per_step_A_norms.empty()) throw std::invalid_argument("iss_bounds: empty norm lists");
    double prod = 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < per_step_A_norms.size(); ++i) {
        sum = per_step_A_norms[i] * sum + per_step_B_norms[i];
        prod *= per_step_A_norms[i];
    }
    return IssBound{prod * w0_norm, u_sup * sum};
}

StabilityMonitor::StabilityMonitor(MonitorConfig cfg, double w0_norm)
    : cfg_(std::move(cfg)), w0_norm_(w0_norm), initialized_(true) {
    cfg_.validate();
    ensure_finite(w0_norm, "monitor initial state norm");
    if (w0_norm < 0.0)
        throw std::invalid_argument("monitor initial state norm must be nonnegative");
}

const StabilityReport& StabilityMonitor::push(StabilityReport r) {
    history_.push_back(std::move(r));
    while (history_.size() > cfg_.history_cap) history_.pop_front();
    return history_.back();
}

const StabilityReport& StabilityMonitor::observe(const StateSpaceStep& ss, double w_norm,
                                                 bool diverged) {
    if (!initialized_)
        throw std::logic_error("stability monitor used before initialization");
    if (ss.A.rows() != ss.A.cols())
        throw std::invalid_argument("observe: A must be square");
    if (ss.B.rows() != ss.A.rows() || ss.B.cols() != ss.u.size())
        throw std::invalid_argument("observe: B/u dimensions must conform to A");
    ensure_finite(ss.A, "observe A");
    ensure_finite(ss.B, "observe B");
    ensure_finite(ss.u, "observe u");
    ensure_finite(w_norm, "observe w_norm");

    ++k_;
    StabilityReport r;
    r.k = k_;
    r.w_norm = w_norm;

    r.lmd_frob = frobenius_norm(ss.A);
    const bool want_spec = cfg_.norm_kind == NormKind::spectral || ss.A.rows() <= 64;
    if (want_spec) r.lmd_spec = spectral_norm_est(ss.A).value;

    r.rho_analytic = ss.rank1_t
                         ? spectral_radius_rank1_lmd(*ss.rank1_t,
                                                     static_cast<std::size_t>(ss.A.rows()))
                         : spectral_radius_est(ss.A).value;

    const double step_norm =
        cfg_.norm_kind == NormKind::frobenius ? r.lmd_frob : *r.lmd_spec;
    const double b_frob = frobenius_norm(ss.B);
    const double b_norm =
        cfg_.norm_kind == NormKind::frobenius ? b_frob : spectral_norm_est(ss.B).value;
    ma_ = std::max(ma_, step_norm);
    mb_ = std::max(mb_, b_norm);
    lu_ = std::max(lu_, ss.u.norm());
    r.running_MA = ma_;
    r.running_MB = mb_;
    r.running_Lu = lu_;

    // Input-term recurrence: sum <- a*sum + b extends every product in the
    // sum by the newest factor and appends the newest B norm.
    iss_sum_ = r.lmd_frob * iss_sum_ + b_frob;
    iss_prod_ *= r.lmd_frob;
    r.iss = IssBound{iss_prod_ * w0_norm_, lu_ * iss_sum_};

    ring_.push_back(ss.A);
    while (ring_.size() > cfg_.window_p) ring_.pop_front();
    if (ring_.size() == cfg_.window_p &&
        k_ % static_cast<long>(cfg_.eval_stride) == 0) {
        const std::vector<Mat> window(ring_.begin(), ring_.end());
        r.window_norm = window_condition(cfg_, window);
        window_sup_ = std::max(window_sup_, *r.window_norm);
        window_seen_ = true;
    }

    if (r.rho_analytic > cfg_.alarm_threshold)
        ++exceed_run_;
    else
        exceed_run_ = 0;

    if (diverged)
        r.alarm_reason = AlarmReason::divergence;
    else if (r.window_norm && *r.window_norm > cfg_.alarm_threshold)
        r.alarm_reason = AlarmReason::window_product;
    else if (exceed_run_ >= cfg_.window_p)
        r.alarm_reason = AlarmReason::per_step_norm;
    r.alarm = r.alarm_reason != AlarmReason::none;

    // Contraction certificates: the running M_A directly (scalar-friendly),
    // or a sustained contractive window converted to its per-step equivalent
    // q = window_sup^(1/p). The window route lapses permanently once any
    // full window reaches 1, because window_sup is a supremum.
    std::optional<double> q;
    if (ma_ < 1.0) q = ma_;
    if (window_seen_ && window_sup_ < 1.0) {
        const double qw = std::pow(window_sup_, 1.0 / static_cast<double>(cfg_.window_p));
        q = q ? std::min(*q, qw) : qw;
    }
    if (q) r.bibs_bound = w0_norm_ + mb_ * lu_ / (1.0 - *q);

    return push(std::move(r));
}

const StabilityReport& StabilityMonitor::flag_divergence(double w_norm) {
    if (!initialized_)
        throw std::logic_error("stability monitor used before initialization");
    ++k_;
    StabilityReport r;
    if (!history_.empty()) {
        r = history_.back();
        r.window_norm.reset();
    }
    r.k = k_;
    // A diverged state may have overflowed; keep the logged norm finite.
    r.w_norm = std::isfinite(w_norm)
                   ? w_norm
                   : (history_.empty() ? w0_norm_ : history_.back().w_norm);
    r.alarm = true;
    r.alarm_reason = AlarmReason::divergence;
    return push(std::move(r));
}

std::string to_json_line(const StabilityReport& r, double e) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["e"] = e;
    j["w_norm"] = r.w_norm;
    j["rho"] = r.rho_analytic;
    j["frob"] = r.lmd_frob;
    j["spec"] = r.lmd_spec ? nlohmann::ordered_json(*r.lmd_spec)
                           : nlohmann::ordered_json(nullptr);
    j["window_norm"] = r.window_norm ? nlohmann::ordered_json(*r.window_norm)
                                     : nlohmann::ordered_json(nullptr);
    j["MA"] = r.running_MA;
    j["MB"] = r.running_MB;
    j["Lu"] = r.running_Lu;
    j["bibs_bound"] = r.bibs_bound ? nlohmann::ordered_json(*r.bibs_bound)
                                   : nlohmann::ordered_json(nullptr);
    j["alarm"] = r.alarm;
    j["alarm_reason"] = r.alarm ? nlohmann::ordered_json(to_string(r.alarm_reason))
                                : nlohmann::ordered_json(nullptr);
    return j.dump();
}

}  // namespace iplna
