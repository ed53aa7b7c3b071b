#include "iplna/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace iplna {

namespace {

[[noreturn]] void throw_nonfinite(const char* what) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

// Power iteration core shared by the two estimators. `apply` maps v to the
// iterated vector; the growth factor per application is the estimate.
template <typename Apply>
SpectralEstimate power_iterate(Eigen::Index n, double tol, std::size_t max_iter,
                               Apply&& apply) {
    Vec v = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    SpectralEstimate est;
    bool retried = false;
    double prev = -1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vec next = apply(v);
        const double growth = next.norm();
        est.value = growth;
        est.iterations = it;
        if (growth == 0.0) {
            if (!retried) {
                // All-ones start annihilated in one application: fall back to
                // a second fixed start so the dominant direction is not lost
                // to symmetry. Still deterministic.
                retried = true;
                v = Vec::LinSpaced(n, 1.0, static_cast<double>(n)).normalized();
                prev = -1.0;
                continue;
            }
            est.converged = true;
            return est;
        }
        v = next / growth;
        if (prev >= 0.0 && std::abs(growth - prev) <= tol * std::max(growth, 1e-300)) {
            est.converged = true;
            return est;
        }
        prev = growth;
    }
    return est;
}

}  // namespace

void ensure_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw_nonfinite(what);
}

void ensure_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw_nonfinite(what);
}

void ensure_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw_nonfinite(what);
}

double frobenius_norm(const Mat& m) {
    ensure_finite(m, "frobenius_norm");
    return m.norm();
}

SpectralEstimate spectral_norm_est(const Mat& m, double tol, std::size_t max_iter) {
    ensure_finite(m, "spectral_norm_est");
    if (tol <= 0.0) throw std::invalid_argument("spectral_norm_est: tol must be > 0");
    if (m.size() == 0) throw std::invalid_argument("spectral_norm_est: empty matrix");
    // One application is v -> m^T (m v); the growth of ||m v|| converges to
    // the top singular value.
    Vec v = Vec::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
    SpectralEstimate est;
    bool retried = false;
    double prev = -1.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vec mv = m * v;
        const double sigma = mv.norm();
        est.value = sigma;
        est.iterations = it;
        if (sigma == 0.0) {
            if (!retried && !m.isZero(0.0)) {
                retried = true;
                v = Vec::LinSpaced(m.cols(), 1.0, static_cast<double>(m.cols())).normalized();
                prev = -1.0;
                continue;
            }
            est.converged = true;
            return est;
        }
        if (prev >= 0.0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-300)) {
            est.converged = true;
            return est;
        }
        prev = sigma;
        Vec w = m.transpose() * mv;
        const double wn = w.norm();
        if (wn == 0.0) {
            est.converged = true;
            return est;
        }
        v = w / wn;
    }
    return est;
}

SpectralEstimate spectral_radius_est(const Mat& m, double tol, std::size_t max_iter) {
    ensure_finite(m, "spectral_radius_est");
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius_est: matrix must be square");
    if (tol <= 0.0) throw std::invalid_argument("spectral_radius_est: tol must be > 0");
    return power_iterate(m.rows(), tol, max_iter, [&m](const Vec& v) -> Vec { return m * v; });
}

double spectral_radius_rank1_lmd(double eta_gnorm2, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("spectral_radius_rank1_lmd: dim must be >= 1");
    const double dev = std::abs(1.0 - eta_gnorm2);
    return dim == 1 ? dev : std::max(1.0, dev);
}

Mat window_product(std::span<const Mat> mats) {
    if (mats.empty()) throw std::invalid_argument("window_product: empty window");
    const Eigen::Index n = mats.front().rows();
    for (const Mat& m : mats) {
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("window_product: dimension mismatch");
        ensure_finite(m, "window_product");
    }
    Mat acc = mats.front();
    for (std::size_t i = 1; i < mats.size(); ++i)
        acc = mats[i] * acc;  // newer factors multiply from the left
    return acc;
}

}  // namespace iplna
