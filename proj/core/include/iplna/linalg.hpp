#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace iplna {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Throw std::invalid_argument when a value carries NaN/Inf entries. Used at
// API boundaries; internal arithmetic stays unchecked.
void ensure_finite(const Vec& v, const char* what);
void ensure_finite(const Mat& m, const char* what);
void ensure_finite(double x, const char* what);

// Frobenius norm: sqrt of the entrywise sum of squares. Zero iff m is the
// zero matrix.
double frobenius_norm(const Mat& m);

struct SpectralEstimate {
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

// Largest singular value of m (any shape) by power iteration on m^T m.
// The starting vector is the normalized all-ones vector so repeated calls are
// deterministic; if that start happens to be orthogonal to the dominant
// singular direction a fixed fallback start is tried once. Non-convergence
// within max_iter leaves `converged` false and returns the best estimate.
SpectralEstimate spectral_norm_est(const Mat& m, double tol = 1e-12,
                                   std::size_t max_iter = 1000);

// Dominant |eigenvalue| estimate by power iteration on m itself. Converges
// for a real dominant eigenvalue; a complex dominant pair makes the iterate
// oscillate, which shows up as `converged == false`.
SpectralEstimate spectral_radius_est(const Mat& m, double tol = 1e-12,
                                     std::size_t max_iter = 1000);

// Spectral radius of A = I - eta * g * g^T given t = eta * ||g||^2.
// The spectrum is {1 (dim-1 times), 1 - t}, so the radius is |1 - t| for
// dim == 1 and max(1, |1 - t|) for dim >= 2.
double spectral_radius_rank1_lmd(double eta_gnorm2, std::size_t dim);

// Product of square matrices given in chronological order (oldest first).
// The newest matrix is applied last, i.e. ends up leftmost:
//   window_product({A1, A2, A3}) == A3 * A2 * A1.
Mat window_product(std::span<const Mat> mats);

}  // namespace iplna
