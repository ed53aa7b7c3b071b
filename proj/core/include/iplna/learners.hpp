#pragma once

#include "iplna/linalg.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace iplna {

// A weight update produced non-finite values. Carries the sample index where
// stability was lost so callers can report it instead of propagating NaN.
class divergence_error : public std::runtime_error {
public:
    divergence_error(long step, const std::string& what)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

// One sample's bookkeeping: the a-priori error e = y - g.w and the effective
// step size(s) used. `x` is filled by callers that have the raw input.
struct SampleStep {
    long k = 0;
    Vec x;
    double y = 0.0;
    Vec g;
    double e = 0.0;
    Vec eta;  // length 1, or one entry per weight for elementwise ADAM
};

// One step of the weight-update dynamics written as
//   state(k+1) = A(k) * state(k) + B(k) * u(k).
// For single-sample gradient rules the state is w and A is the local matrix
// of dynamics I - eta g g^T; for ADAM the state is the 4-block stack
// [w(k-1); w(k); m(k-1); m(k)] and `extended` is set.
struct StateSpaceStep {
    Mat A;
    Mat B;
    Vec u;
    bool extended = false;
    // Set when A's spectrum is known to be {1, ..., 1, 1 - t} (rank-one
    // update of the identity): t = eta ||g||^2 for GD/NGD, t = g.kv for RLS.
    std::optional<double> rank1_t;
};

struct GdState {
    double mu = 0.1;  // fixed learning rate, > 0
};

struct NgdState {
    double mu = 1.0;   // normalized rate; contraction of the active direction needs mu < 2
    double eps = 1e-8; // regularizer, > 0
};

// Exponentially weighted RLS with inverse-correlation matrix P.
struct RlsState {
    Mat P;
    double mu = 0.99;     // forgetting factor in (0, 1]
    double delta = 100.0; // P(0) = delta * I
};
RlsState make_rls_state(std::size_t dim, double mu = 0.99, double delta = 100.0);

// `scalar` reduces the second moment to one effective step per sample, which
// keeps the extended-state dynamics matrix well formed; `elementwise` is the
// conventional per-coordinate step (a diagonal matrix in the state-space
// form).
enum class AdamMode { scalar, elementwise };

struct AdamState {
    Vec m;  // first moment
    Vec v;  // raw second-moment accumulator
    double mu = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    AdamMode mode = AdamMode::scalar;
    long k = 0;  // completed updates; bias correction uses k+1
    // One-step-delayed values feeding the extended-state blocks. Empty until
    // the first step, which seeds them as prev_w = w, prev_m = 0, prev_eta = 0.
    Vec prev_eta;
    Vec prev_m;
    Vec prev_w;
    // Pins eta(k) to a constant, bypassing the second-moment machinery.
    // Diagnostic knob for tracing the dynamics with a known step size.
    std::optional<double> eta_override;
};
AdamState make_adam_state(std::size_t dim, double mu = 0.001, double beta1 = 0.9,
                          double beta2 = 0.999, double eps = 1e-8,
                          AdamMode mode = AdamMode::scalar);

struct GradStepResult {
    Vec w_next;
    StateSpaceStep ss;
    SampleStep sample;
};

struct RlsStepResult {
    Vec w_next;
    StateSpaceStep ss;
    SampleStep sample;
    RlsState state;
};

struct AdamStepResult {
    Vec w_next;
    StateSpaceStep ss;
    SampleStep sample;
    AdamState state;
};

// Plain gradient descent:
//   w(k+1) = w(k) + mu e(k) g(k),  A = I - mu g g^T,  B = mu I,  u = y g.
GradStepResult gd_step(const Vec& w, const Vec& g, double y, const GdState& s, long k = 0);

// Normalized gradient descent (NLMS): eta(k) = mu / (||g||^2 + eps), which
// keeps eta ||g||^2 < mu for every step.
GradStepResult ngd_step(const Vec& w, const Vec& g, double y, const NgdState& s, long k = 0);

// RLS step: gain kv = P g / (mu + g.P g), w(k+1) = w + kv e,
// P(k+1) = (P - kv g^T P) / mu, symmetrized. A = I - kv g^T, B = kv, u = [y].
RlsStepResult rls_step(const Vec& w, const Vec& g, double y, const RlsState& s, long k = 0);

// ADAM with step-delayed moment: w(k+1) = w - eta(k) m(k), then
// m(k+1) = beta1 m(k) + (beta1 - 1) e(k) g(k). The state-space output is the
// extended 4-block form over [w(k-1); w(k); m(k-1); m(k)].
AdamStepResult adam_step(const Vec& w, const Vec& g, double y, const AdamState& s, long k = 0);

// Batch gradient step over stacked feature rows G (one sample per row):
//   w(k+1) = w + eta G^T (ys - G w),  A = I - eta G^T G,  B = eta I,
//   u = G^T ys. For the NGD overload eta = mu / (||G||_F^2 + eps).
struct BatchStepResult {
    Vec w_next;
    StateSpaceStep ss;
};
BatchStepResult batch_gd_step(const Vec& w, const Mat& G, const Vec& ys, const GdState& s);
BatchStepResult batch_gd_step(const Vec& w, const Mat& G, const Vec& ys, const NgdState& s);

// Stateful wrapper around the step functions so the run loop can treat all
// algorithms uniformly. `monitored_norm` is the norm of the state vector the
// returned StateSpaceStep evolves (||w|| for GD/NGD/RLS, the extended-state
// norm for ADAM).
class Learner {
public:
    virtual ~Learner() = default;

    struct Outcome {
        Vec w_next;
        StateSpaceStep ss;
        SampleStep sample;
        double monitored_norm = 0.0;
    };

    virtual Outcome step(const Vec& x, const Vec& g, double y, long k) = 0;
    virtual const Vec& weights() const = 0;
    virtual double initial_state_norm() const = 0;
    virtual std::string name() const = 0;
};

// Learner spec strings:
//   gd:mu=<f>
//   ngd:mu=<f>,eps=<f>
//   rls:mu=<f>,delta=<f>
//   adam:mu=<f>,beta1=<f>,beta2=<f>,eps=<f>[,mode=<scalar|elementwise>]
// `dim` is the feature dimension; `w0` is the initial weight vector.
std::unique_ptr<Learner> make_learner(const std::string& spec, Vec w0);

}  // namespace iplna
