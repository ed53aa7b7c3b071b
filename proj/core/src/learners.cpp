#include "iplna/learners.hpp"

#include "kv_parse.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace iplna {

namespace {

void check_inputs(const Vec& w, const Vec& g, double y, const char* what) {
    if (w.size() != g.size())
        throw std::invalid_argument(std::string(what) + ": w and g must have equal length");
    if (w.size() == 0) throw std::invalid_argument(std::string(what) + ": empty weight vector");
    ensure_finite(w, what);
    ensure_finite(g, what);
    ensure_finite(y, what);
}

// A = I - eta g g^T, B = eta I, u = y g: the single-sample gradient
// decomposition common to GD and NGD.
StateSpaceStep rank1_decomposition(double eta, const Vec& g, double y) {
    const Eigen::Index n = g.size();
    StateSpaceStep ss;
    ss.A = -eta * (g * g.transpose());
    ss.A.diagonal().array() += 1.0;
    ss.B = eta * Mat::Identity(n, n);
    ss.u = y * g;
    ss.rank1_t = eta * g.squaredNorm();
    return ss;
}

GradStepResult grad_step(const Vec& w, const Vec& g, double y, double eta, long k,
                         const char* what) {
    double e = y - g.dot(w);
    Vec w_next = w + eta * e * g;
    if (!w_next.allFinite() || !std::isfinite(e))
        throw divergence_error(k, std::string(what) + ": non-finite update");

    GradStepResult r;
    r.w_next = std::move(w_next);
    r.ss = rank1_decomposition(eta, g, y);
    r.sample.k = k;
    r.sample.y = y;
    r.sample.g = g;
    r.sample.e = e;
    r.sample.eta = Vec::Constant(1, eta);
    return r;
}

}  // namespace

GradStepResult gd_step(const Vec& w, const Vec& g, double y, const GdState& s, long k) {
    check_inputs(w, g, y, "gd_step");
    if (s.mu <= 0.0) throw std::invalid_argument("gd_step: mu must be > 0");
    return grad_step(w, g, y, s.mu, k, "gd_step");
}

GradStepResult ngd_step(const Vec& w, const Vec& g, double y, const NgdState& s, long k) {
    check_inputs(w, g, y, "ngd_step");
    if (s.mu <= 0.0) throw std::invalid_argument("ngd_step: mu must be > 0");
    if (s.eps <= 0.0) throw std::invalid_argument("ngd_step: eps must be > 0");
    const double eta = s.mu / (g.squaredNorm() + s.eps);
    return grad_step(w, g, y, eta, k, "ngd_step");
}

RlsState make_rls_state(std::size_t dim, double mu, double delta) {
    if (dim == 0) throw std::invalid_argument("make_rls_state: dim must be >= 1");
    if (mu <= 0.0 || mu > 1.0)
        throw std::invalid_argument("make_rls_state: forgetting factor must be in (0, 1]");
    if (delta <= 0.0) throw std::invalid_argument("make_rls_state: delta must be > 0");
    return RlsState{delta * Mat::Identity(dim, dim), mu, delta};
}

RlsStepResult rls_step(const Vec& w, const Vec& g, double y, const RlsState& s, long k) {
    check_inputs(w, g, y, "rls_step");
    if (s.P.rows() != w.size() || s.P.cols() != w.size())
        throw std::invalid_argument("rls_step: P dimension mismatch");
    if (s.mu <= 0.0 || s.mu > 1.0)
        throw std::invalid_argument("rls_step: forgetting factor must be in (0, 1]");
    ensure_finite(s.P, "rls_step P");

    const Vec pg = s.P * g;
    const double denom = s.mu + g.dot(pg);
    const Vec kv = pg / denom;
    const double e = y - g.dot(w);
    Vec w_next = w + kv * e;

    Mat p_next = (s.P - kv * pg.transpose()) / s.mu;
    p_next = 0.5 * (p_next + p_next.transpose()).eval();  // keep P symmetric

    if (!w_next.allFinite() || !p_next.allFinite() || !std::isfinite(e))
        throw divergence_error(k, "rls_step: non-finite update");

    RlsStepResult r;
    r.w_next = std::move(w_next);
    r.ss.A = -(kv * g.transpose());
    r.ss.A.diagonal().array() += 1.0;
    r.ss.B = Mat(kv);  // n x 1 gain applied to the scalar input
    r.ss.u = Vec::Constant(1, y);
    r.ss.rank1_t = g.dot(kv);
    r.sample.k = k;
    r.sample.y = y;
    r.sample.g = g;
    r.sample.e = e;
    r.sample.eta = Vec::Constant(1, 1.0 / denom);  // scalar gain scale: kv = P g / denom
    r.state = RlsState{std::move(p_next), s.mu, s.delta};
    return r;
}

AdamState make_adam_state(std::size_t dim, double mu, double beta1, double beta2, double eps,
                          AdamMode mode) {
    if (dim == 0) throw std::invalid_argument("make_adam_state: dim must be >= 1");
    if (mu <= 0.0) throw std::invalid_argument("make_adam_state: mu must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0)
        throw std::invalid_argument("make_adam_state: beta1 must be in [0, 1)");
    if (beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("make_adam_state: beta2 must be in [0, 1)");
    if (eps <= 0.0) throw std::invalid_argument("make_adam_state: eps must be > 0");
    AdamState s;
    s.m = Vec::Zero(dim);
    s.v = Vec::Zero(dim);
    s.mu = mu;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    s.mode = mode;
    return s;
}

namespace {

// eta(k) from the delayed second moment. Scalar mode reduces v to its mean
// before the square root; elementwise mode applies the conventional
// (1 - beta2^j) correction under the root. Both divide by (1 - beta1^k).
Vec adam_eta(const AdamState& s, long k_next, Eigen::Index n) {
    if (s.eta_override) {
        const double v = *s.eta_override;
        return s.mode == AdamMode::scalar ? Vec::Constant(1, v) : Vec::Constant(n, v);
    }
    const double bias1 = 1.0 - std::pow(s.beta1, static_cast<double>(k_next));
    if (s.mode == AdamMode::scalar) {
        const double vmean = s.v.size() > 0 ? s.v.mean() : 0.0;
        return Vec::Constant(1, s.mu / ((std::sqrt(vmean) + s.eps) * bias1));
    }
    Vec vhat = Vec::Zero(n);
    if (s.k > 0) {
        const double bias2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.k));
        vhat = s.v / bias2;
    }
    Vec eta(n);
    for (Eigen::Index i = 0; i < n; ++i)
        eta(i) = s.mu / ((std::sqrt(vhat(i)) + s.eps) * bias1);
    return eta;
}

Vec apply_eta(const Vec& eta, const Vec& v) {
    if (eta.size() == 1) return eta(0) * v;
    return eta.cwiseProduct(v);
}

}  // namespace

AdamStepResult adam_step(const Vec& w, const Vec& g, double y, const AdamState& s, long k) {
    check_inputs(w, g, y, "adam_step");
    const Eigen::Index n = w.size();
    if (s.m.size() != n || s.v.size() != n)
        throw std::invalid_argument("adam_step: state dimension mismatch");

    // eta(k-1) seeds to zero on first use, which makes the extended state
    // consistent from the start: w(k) = w(k-1) - eta(k-1) m(k-1) holds trivially.
    const Eigen::Index eta_len = s.mode == AdamMode::scalar ? 1 : n;
    const Vec prev_eta = s.prev_eta.size() > 0 ? s.prev_eta : Vec(Vec::Zero(eta_len));

    const long k_next = s.k + 1;
    const Vec eta = adam_eta(s, k_next, n);

    // Direct recursion.
    Vec w_next = w - apply_eta(eta, s.m);
    const double e = y - g.dot(w);
    Vec m_next = s.beta1 * s.m + (s.beta1 - 1.0) * e * g;
    const Vec grad = -e * g;
    Vec v_next = s.beta2 * s.v + (1.0 - s.beta2) * grad.cwiseProduct(grad);

    if (!w_next.allFinite() || !m_next.allFinite() || !v_next.allFinite() ||
        !eta.allFinite() || !std::isfinite(e))
        throw divergence_error(k, "adam_step: non-finite update");

    // Extended-state form over [w(k-1); w(k); m(k-1); m(k)].
    const Mat ident = Mat::Identity(n, n);
    const Mat gram = g * g.transpose();
    Mat a = Mat::Zero(4 * n, 4 * n);
    a.block(0, n, n, n) = ident;
    a.block(n, n, n, n) = ident;
    a.block(n, 3 * n, n, n) =
        eta.size() == 1 ? Mat(-eta(0) * ident) : Mat(-eta.asDiagonal().toDenseMatrix());
    a.block(2 * n, 3 * n, n, n) = ident;
    a.block(3 * n, 0, n, n) = (1.0 - s.beta1) * gram;
    a.block(3 * n, 2 * n, n, n) =
        prev_eta.size() == 1 ? Mat((s.beta1 - 1.0) * prev_eta(0) * gram)
                             : Mat((s.beta1 - 1.0) * gram * prev_eta.asDiagonal());
    a.block(3 * n, 3 * n, n, n) = s.beta1 * ident;

    Mat b = Mat::Zero(4 * n, n);
    b.block(3 * n, 0, n, n) = (s.beta1 - 1.0) * ident;

    AdamStepResult r;
    r.ss.A = std::move(a);
    r.ss.B = std::move(b);
    r.ss.u = y * g;
    r.ss.extended = true;

    r.sample.k = k;
    r.sample.y = y;
    r.sample.g = g;
    r.sample.e = e;
    r.sample.eta = eta;

    r.state = s;
    r.state.m = std::move(m_next);
    r.state.v = std::move(v_next);
    r.state.k = k_next;
    r.state.prev_eta = eta;
    r.state.prev_m = s.m;
    r.state.prev_w = w;
    r.w_next = std::move(w_next);
    return r;
}

namespace {

BatchStepResult batch_step(const Vec& w, const Mat& G, const Vec& ys, double eta,
                           const char* what) {
    if (G.rows() != ys.size())
        throw std::invalid_argument(std::string(what) + ": row count of G must match ys");
    if (G.cols() != w.size())
        throw std::invalid_argument(std::string(what) + ": column count of G must match w");
    if (G.rows() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
    ensure_finite(w, what);
    ensure_finite(G, what);
    ensure_finite(ys, what);

    const Eigen::Index n = w.size();
    BatchStepResult r;
    r.w_next = w + eta * (G.transpose() * (ys - G * w));
    if (!r.w_next.allFinite())
        throw divergence_error(0, std::string(what) + ": non-finite update");
    r.ss.A = -eta * (G.transpose() * G);
    r.ss.A.diagonal().array() += 1.0;
    r.ss.B = eta * Mat::Identity(n, n);
    r.ss.u = G.transpose() * ys;
    if (G.rows() == 1) r.ss.rank1_t = eta * G.row(0).squaredNorm();
    return r;
}

}  // namespace

BatchStepResult batch_gd_step(const Vec& w, const Mat& G, const Vec& ys, const GdState& s) {
    if (s.mu <= 0.0) throw std::invalid_argument("batch_gd_step: mu must be > 0");
    return batch_step(w, G, ys, s.mu, "batch_gd_step");
}

BatchStepResult batch_gd_step(const Vec& w, const Mat& G, const Vec& ys, const NgdState& s) {
    if (s.mu <= 0.0) throw std::invalid_argument("batch_gd_step: mu must be > 0");
    if (s.eps <= 0.0) throw std::invalid_argument("batch_gd_step: eps must be > 0");
    const double eta = s.mu / (G.squaredNorm() + s.eps);
    return batch_step(w, G, ys, eta, "batch_gd_step");
}

namespace {

class GdLearner final : public Learner {
public:
    GdLearner(GdState s, Vec w0) : s_(s), w_(std::move(w0)) {}
    Outcome step(const Vec& x, const Vec& g, double y, long k) override {
        auto r = gd_step(w_, g, y, s_, k);
        r.sample.x = x;
        w_ = r.w_next;
        return {std::move(r.w_next), std::move(r.ss), std::move(r.sample), w_.norm()};
    }
    const Vec& weights() const override { return w_; }
    double initial_state_norm() const override { return w_.norm(); }
    std::string name() const override { return "gd"; }

private:
    GdState s_;
    Vec w_;
};

class NgdLearner final : public Learner {
public:
    NgdLearner(NgdState s, Vec w0) : s_(s), w_(std::move(w0)) {}
    Outcome step(const Vec& x, const Vec& g, double y, long k) override {
        auto r = ngd_step(w_, g, y, s_, k);
        r.sample.x = x;
        w_ = r.w_next;
        return {std::move(r.w_next), std::move(r.ss), std::move(r.sample), w_.norm()};
    }
    const Vec& weights() const override { return w_; }
    double initial_state_norm() const override { return w_.norm(); }
    std::string name() const override { return "ngd"; }

private:
    NgdState s_;
    Vec w_;
};

class RlsLearner final : public Learner {
public:
    RlsLearner(RlsState s, Vec w0) : s_(std::move(s)), w_(std::move(w0)) {}
    Outcome step(const Vec& x, const Vec& g, double y, long k) override {
        auto r = rls_step(w_, g, y, s_, k);
        r.sample.x = x;
        w_ = r.w_next;
        s_ = std::move(r.state);
        return {std::move(r.w_next), std::move(r.ss), std::move(r.sample), w_.norm()};
    }
    const Vec& weights() const override { return w_; }
    double initial_state_norm() const override { return w_.norm(); }
    std::string name() const override { return "rls"; }

private:
    RlsState s_;
    Vec w_;
};

class AdamLearner final : public Learner {
public:
    AdamLearner(AdamState s, Vec w0) : s_(std::move(s)), w_(std::move(w0)) {}
    Outcome step(const Vec& x, const Vec& g, double y, long k) override {
        auto r = adam_step(w_, g, y, s_, k);
        r.sample.x = x;
        w_ = r.w_next;
        s_ = std::move(r.state);
        // Norm of [w(k); w(k+1); m(k); m(k+1)], the state the extended form evolves.
        const double sq = s_.prev_w.squaredNorm() + w_.squaredNorm() +
                          s_.prev_m.squaredNorm() + s_.m.squaredNorm();
        return {std::move(r.w_next), std::move(r.ss), std::move(r.sample), std::sqrt(sq)};
    }
    const Vec& weights() const override { return w_; }
    double initial_state_norm() const override {
        // [w0; w0; 0; 0]
        return std::sqrt(2.0) * w_.norm();
    }
    std::string name() const override { return "adam"; }

private:
    AdamState s_;
    Vec w_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(const std::string& spec, Vec w0) {
    const auto [head, rest] = detail::split_head(spec, ':');
    const std::size_t dim = static_cast<std::size_t>(w0.size());
    if (dim == 0) throw std::invalid_argument("make_learner: empty initial weights");

    if (head == "gd") {
        detail::FieldReader fields("learner spec 'gd'", rest);
        GdState s;
        s.mu = fields.take_double("mu");
        fields.finish();
        if (s.mu <= 0.0) throw std::invalid_argument("learner spec 'gd': mu must be > 0");
        return std::make_unique<GdLearner>(s, std::move(w0));
    }
    if (head == "ngd") {
        detail::FieldReader fields("learner spec 'ngd'", rest);
        NgdState s;
        s.mu = fields.take_double("mu");
        s.eps = fields.take_double("eps");
        fields.finish();
        if (s.mu <= 0.0) throw std::invalid_argument("learner spec 'ngd': mu must be > 0");
        if (s.eps <= 0.0) throw std::invalid_argument("learner spec 'ngd': eps must be > 0");
        return std::make_unique<NgdLearner>(s, std::move(w0));
    }
    if (head == "rls") {
        detail::FieldReader fields("learner spec 'rls'", rest);
        const double mu = fields.take_double("mu");
        const double delta = fields.take_double("delta");
        fields.finish();
        return std::make_unique<RlsLearner>(make_rls_state(dim, mu, delta), std::move(w0));
    }
    if (head == "adam") {
        detail::FieldReader fields("learner spec 'adam'", rest);
        const double mu = fields.take_double("mu");
        const double beta1 = fields.take_double("beta1");
        const double beta2 = fields.take_double("beta2");
        const double eps = fields.take_double("eps");
        AdamMode mode = AdamMode::scalar;
        if (fields.has("mode")) {
            const std::string m = fields.take("mode");
            if (m == "scalar") {
                mode = AdamMode::scalar;
            } else if (m == "elementwise") {
                mode = AdamMode::elementwise;
            } else {
                throw std::invalid_argument(
                    "learner spec 'adam': mode must be scalar or elementwise");
            }
        }
        fields.finish();
        return std::make_unique<AdamLearner>(make_adam_state(dim, mu, beta1, beta2, eps, mode),
                                             std::move(w0));
    }
    throw std::invalid_argument("learner spec: unknown algorithm '" + head +
                                "' (expected gd, ngd, rls, or adam)");
}

}  // namespace iplna
