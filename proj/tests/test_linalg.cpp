#include "iplna/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using iplna::Mat;
using iplna::Vec;

TEST_CASE("frobenius norm on fixed matrices") {
    CHECK(iplna::frobenius_norm(Mat::Identity(3, 3)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(iplna::frobenius_norm(Mat::Zero(3, 3)) == 0.0);

    // I - 0.5 e1 e1^T has diagonal (0.5, 1, 1): norm sqrt(0.25 + 1 + 1) = 1.5.
    Mat a = Mat::Identity(3, 3);
    a(0, 0) = 0.5;
    CHECK(iplna::frobenius_norm(a) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("frobenius norm matches the summation definition on random matrices") {
    oracle::TestRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat m = rng.matrix(5, 7, -3.0, 3.0);
        double sq = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) sq += m(i, j) * m(i, j);
        CHECK(iplna::frobenius_norm(m) == doctest::Approx(std::sqrt(sq)).epsilon(1e-13));
    }
}

TEST_CASE("spectral norm estimate on fixed matrices") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const auto est = iplna::spectral_norm_est(d);
    CHECK(est.value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(est.converged);

    CHECK(iplna::spectral_norm_est(Mat::Identity(4, 4)).value == doctest::Approx(1.0));
    CHECK(iplna::spectral_norm_est(Mat::Zero(3, 3)).value == 0.0);

    // I - 1.8 e1 e1^T = diag(-0.8, 1, 1): largest singular value 1.
    Mat a = Mat::Identity(3, 3);
    a(0, 0) = -0.8;
    CHECK(iplna::spectral_norm_est(a).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral norm estimate agrees with a dense eigensolve") {
    oracle::TestRng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat m = rng.matrix(4, 4, -2.0, 2.0);
        CHECK(iplna::spectral_norm_est(m).value ==
              doctest::Approx(oracle::eig_spectral_norm(m)).epsilon(1e-9));
    }
    // Rectangular input is allowed.
    const Mat r = rng.matrix(5, 2, -1.0, 1.0);
    CHECK(iplna::spectral_norm_est(r).value ==
          doctest::Approx(oracle::eig_spectral_norm(r)).epsilon(1e-9));
}

TEST_CASE("spectral radius estimate on matrices with a dominant real eigenvalue") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 0.9;
    d(1, 1) = -0.95;
    CHECK(iplna::spectral_radius_est(d).value == doctest::Approx(0.95).epsilon(1e-9));

    Mat t = Mat::Zero(2, 2);  // triangular: eigenvalues on the diagonal
    t(0, 0) = 0.9;
    t(0, 1) = 5.0;
    t(1, 1) = 0.2;
    CHECK(iplna::spectral_radius_est(t).value == doctest::Approx(0.9).epsilon(1e-9));

    oracle::TestRng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Mat m = rng.matrix(5, 5, -1.0, 1.0);
        m = ((m + m.transpose()) / 2.0).eval();  // symmetric: real spectrum
        CHECK(iplna::spectral_radius_est(m).value ==
              doctest::Approx(oracle::eig_spectral_radius(m)).epsilon(1e-8));
    }
}

TEST_CASE("closed-form spectral radius of rank-one-update matrices") {
    // dim 1: the only eigenvalue is 1 - t.
    CHECK(iplna::spectral_radius_rank1_lmd(0.5, 1) == doctest::Approx(0.5));
    CHECK(iplna::spectral_radius_rank1_lmd(2.5, 1) == doctest::Approx(1.5));
    // dim >= 2: the untouched directions keep eigenvalue 1.
    CHECK(iplna::spectral_radius_rank1_lmd(0.5, 3) == doctest::Approx(1.0));
    CHECK(iplna::spectral_radius_rank1_lmd(2.5, 4) == doctest::Approx(1.5));
    CHECK(iplna::spectral_radius_rank1_lmd(2.0, 4) == doctest::Approx(1.0));

    oracle::TestRng rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        const auto dim = static_cast<Eigen::Index>(1 + trial % 8);
        Vec g = rng.vector(dim, -2.0, 2.0);
        if (g.norm() < 1e-3) g(0) += 1.0;
        const double eta = rng.uniform(0.01, 1.5);
        const Mat a = Mat::Identity(dim, dim) - eta * (g * g.transpose());
        const double expected = oracle::eig_spectral_radius(a);
        const double got = iplna::spectral_radius_rank1_lmd(
            eta * g.squaredNorm(), static_cast<std::size_t>(dim));
        CHECK(got == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("window product multiplies newest-last, oldest-first input") {
    oracle::TestRng rng(53);
    const Mat a1 = rng.matrix(3, 3, -1.0, 1.0);
    const Mat a2 = rng.matrix(3, 3, -1.0, 1.0);
    const Mat a3 = rng.matrix(3, 3, -1.0, 1.0);

    const std::vector<Mat> single{a1};
    CHECK(iplna::window_product(single).isApprox(a1));

    const std::vector<Mat> three{a1, a2, a3};
    const Mat expected = oracle::naive_matmul(a3, oracle::naive_matmul(a2, a1));
    CHECK(iplna::window_product(three).isApprox(expected, 1e-12));

    // The order matters: the reversed product must differ for these factors.
    const Mat reversed = oracle::naive_matmul(a1, oracle::naive_matmul(a2, a3));
    CHECK_FALSE(iplna::window_product(three).isApprox(reversed, 1e-6));
}

TEST_CASE("window product rejects bad input") {
    const std::vector<Mat> empty;
    CHECK_THROWS_AS(iplna::window_product(empty), std::invalid_argument);

    const std::vector<Mat> mismatched{Mat::Identity(2, 2), Mat::Identity(3, 3)};
    CHECK_THROWS_AS(iplna::window_product(mismatched), std::invalid_argument);

    const std::vector<Mat> rect{Mat::Zero(2, 3)};
    CHECK_THROWS_AS(iplna::window_product(rect), std::invalid_argument);

    Mat bad = Mat::Identity(2, 2);
    bad(0, 1) = std::nan("");
    const std::vector<Mat> withnan{bad};
    CHECK_THROWS_AS(iplna::window_product(withnan), std::invalid_argument);
}

TEST_CASE("finiteness guard") {
    CHECK_NOTHROW(iplna::ensure_finite(1.25, "value"));
    CHECK_THROWS_AS(iplna::ensure_finite(std::nan(""), "value"), std::invalid_argument);
    CHECK_THROWS_AS(iplna::ensure_finite(HUGE_VAL, "value"), std::invalid_argument);

    Vec v = Vec::Ones(3);
    CHECK_NOTHROW(iplna::ensure_finite(v, "vec"));
    v(1) = -HUGE_VAL;
    CHECK_THROWS_AS(iplna::ensure_finite(v, "vec"), std::invalid_argument);

    Mat m = Mat::Ones(2, 2);
    CHECK_NOTHROW(iplna::ensure_finite(m, "mat"));
    m(1, 0) = std::nan("");
    CHECK_THROWS_AS(iplna::ensure_finite(m, "mat"), std::invalid_argument);
}
