#include "iplna/learners.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using iplna::Mat;
using iplna::Vec;

namespace {

Vec scalar_vec(double v) {
    Vec out(1);
    out << v;
    return out;
}

// State reconstruction error ||A w + B u - w_next|| relative to the update.
double reconstruction_gap(const Vec& w, const iplna::StateSpaceStep& ss, const Vec& w_next) {
    const Vec rebuilt = ss.A * w + ss.B * ss.u;
    return (rebuilt - w_next).norm() / std::max(1.0, w_next.norm());
}

}  // namespace

TEST_CASE("gradient step on a scalar produces the expected decomposition") {
    iplna::GdState s;
    s.mu = 1.0;
    const auto r = iplna::gd_step(scalar_vec(0.0), scalar_vec(1.0), 1.0, s, 5);
    CHECK(r.sample.e == 1.0);
    CHECK(r.w_next(0) == 1.0);
    CHECK(r.ss.A(0, 0) == 0.0);       // 1 - mu*g^2
    CHECK(r.ss.B(0, 0) == 1.0);       // mu
    CHECK(r.ss.u(0) == 1.0);          // y*g
    REQUIRE(r.ss.rank1_t.has_value());
    CHECK(*r.ss.rank1_t == 1.0);
    CHECK(r.sample.k == 5);
}

TEST_CASE("gradient step in two dimensions") {
    iplna::GdState s;
    s.mu = 0.5;
    Vec w(2), g(2);
    w << 1.0, 0.0;
    g << 1.0, 1.0;
    const auto r = iplna::gd_step(w, g, 0.0, s);
    CHECK(r.sample.e == -1.0);
    CHECK(r.w_next(0) == doctest::Approx(0.5));
    CHECK(r.w_next(1) == doctest::Approx(-0.5));
    // A = I - 0.5 * ones(2,2)
    CHECK(r.ss.A(0, 0) == doctest::Approx(0.5));
    CHECK(r.ss.A(0, 1) == doctest::Approx(-0.5));
    CHECK(r.ss.A(1, 0) == doctest::Approx(-0.5));
    CHECK(r.ss.A(1, 1) == doctest::Approx(0.5));
    CHECK(r.ss.u.norm() == 0.0);  // y = 0
    CHECK(reconstruction_gap(w, r.ss, r.w_next) < 1e-14);
}

TEST_CASE("normalized gradient step leaves the weights alone on zero features") {
    iplna::NgdState s;
    s.mu = 1.0;
    s.eps = 1e-8;
    Vec w(3);
    w << 1.0, -2.0, 3.0;
    const auto r = iplna::ngd_step(w, Vec::Zero(3), 5.0, s);
    CHECK((r.w_next - w).norm() == 0.0);
    CHECK(*r.ss.rank1_t == 0.0);
}

TEST_CASE("normalized gradient step annihilates the feature direction at mu = 1") {
    iplna::NgdState s;
    s.mu = 1.0;
    s.eps = 1e-12;
    const auto r = iplna::ngd_step(scalar_vec(0.3), scalar_vec(2.0), 1.0, s);
    // eta = 1/(4 + eps), so A = 1 - eta*4 is zero up to eps.
    CHECK(std::abs(r.ss.A(0, 0)) < 1e-8);
    CHECK(*r.ss.rank1_t == doctest::Approx(1.0));
}

TEST_CASE("normalized gradient steps with mu below two keep the update contractive") {
    oracle::TestRng rng(71);
    iplna::NgdState s;
    s.mu = 1.9;
    s.eps = 1e-12;
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto dim = static_cast<Eigen::Index>(1 + trial % 8);
        Vec g = rng.vector(dim, -10.0, 10.0);
        if (g.norm() == 0.0) g(0) = 1e-6;
        const auto r = iplna::ngd_step(Vec::Zero(dim), g, 1.0, s);
        if (!(std::abs(1.0 - *r.ss.rank1_t) < 1.0)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("recursive least squares on a scalar matches the hand computation") {
    const auto s0 = iplna::make_rls_state(1, 1.0, 1.0);  // P = 1
    const auto r = iplna::rls_step(scalar_vec(0.0), scalar_vec(1.0), 1.0, s0, 2);
    // pi = 1, denom = mu + 1 = 2, gain = 0.5
    CHECK(r.w_next(0) == doctest::Approx(0.5));
    CHECK(r.state.P(0, 0) == doctest::Approx(0.5));
    CHECK(r.ss.A(0, 0) == doctest::Approx(0.5));   // 1 - gain*g
    CHECK(r.ss.B(0, 0) == doctest::Approx(0.5));   // the gain column
    CHECK(r.ss.u.size() == 1);
    CHECK(r.ss.u(0) == 1.0);                       // the target itself
    CHECK(*r.ss.rank1_t == doctest::Approx(0.5));
    CHECK(reconstruction_gap(scalar_vec(0.0), r.ss, r.w_next) < 1e-14);
}

TEST_CASE("recursive least squares recovers the generating weights") {
    oracle::TestRng rng(83);
    const Eigen::Index n = 3;
    Vec w_true(n);
    w_true << 0.7, -1.2, 0.4;

    Mat G(500, n);
    Vec ys(500);
    auto state = iplna::make_rls_state(static_cast<std::size_t>(n), 1.0, 1e6);
    Vec w = Vec::Zero(n);
    for (int k = 0; k < 500; ++k) {
        const Vec g = rng.vector(n, -1.0, 1.0);
        const double y = w_true.dot(g);
        G.row(k) = g;
        ys(k) = y;
        auto r = iplna::rls_step(w, g, y, state, k);
        w = r.w_next;
        state = r.state;
    }
    const Vec w_ls = oracle::least_squares(G, ys);
    CHECK((w - w_ls).norm() < 1e-6);
    CHECK((w - w_true).norm() < 1e-6);
}

TEST_CASE("recursive least squares keeps its covariance symmetric and handles g = 0") {
    oracle::TestRng rng(89);
    auto state = iplna::make_rls_state(4, 0.97, 50.0);
    Vec w = Vec::Zero(4);
    for (int k = 0; k < 100; ++k) {
        const Vec g = rng.vector(4, -2.0, 2.0);
        auto r = iplna::rls_step(w, g, rng.uniform(-1.0, 1.0), state, k);
        w = r.w_next;
        state = r.state;
        CHECK((state.P - state.P.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    }

    const Mat p_before = state.P;
    const auto r = iplna::rls_step(w, Vec::Zero(4), 1.0, state, 100);
    CHECK((r.w_next - w).norm() == 0.0);
    CHECK(r.state.P.isApprox(p_before / 0.97, 1e-12));
}

TEST_CASE("adaptive-moment step sits still at an error-free equilibrium") {
    auto state = iplna::make_adam_state(1, 0.001, 0.9, 0.999, 1e-8);
    const auto r = iplna::adam_step(scalar_vec(1.0), scalar_vec(1.0), 1.0, state, 1);
    CHECK(r.sample.e == 0.0);
    CHECK(r.w_next(0) == 1.0);       // m was zero, so no motion
    CHECK(r.state.m(0) == 0.0);      // and the error kept it zero
}

TEST_CASE("adaptive-moment steps follow the delayed-moment recursion") {
    auto state = iplna::make_adam_state(1, 0.001, 0.9, 0.999, 1e-8);
    state.eta_override = 0.1;  // pin the step size to make the trace exact

    // Step 1: w = 0, m = 0, e = 1. The weight cannot move yet; the moment
    // charges to (beta1 - 1)*e*g = -0.1.
    auto r1 = iplna::adam_step(scalar_vec(0.0), scalar_vec(1.0), 1.0, state, 1);
    CHECK(r1.w_next(0) == 0.0);
    CHECK(r1.state.m(0) == doctest::Approx(-0.1));

    // Step 2: w' = w - eta*m = 0 - 0.1*(-0.1) = 0.01.
    auto r2 = iplna::adam_step(r1.w_next, scalar_vec(1.0), 1.0, r1.state, 2);
    CHECK(r2.w_next(0) == doctest::Approx(0.01));
}

TEST_CASE("adaptive-moment extended-state matrix carries the expected blocks") {
    auto state = iplna::make_adam_state(1, 0.001, 0.9, 0.999, 1e-8);
    state.eta_override = 0.1;
    auto r1 = iplna::adam_step(scalar_vec(0.0), scalar_vec(1.0), 1.0, state, 1);
    // Second step: now eta(k-1) = 0.1 as well.
    auto r2 = iplna::adam_step(r1.w_next, scalar_vec(1.0), 1.0, r1.state, 2);

    const Mat& A = r2.ss.A;
    REQUIRE(A.rows() == 4);
    const double expected[4][4] = {{0.0, 1.0, 0.0, 0.0},
                                   {0.0, 1.0, 0.0, -0.1},
                                   {0.0, 0.0, 0.0, 1.0},
                                   {0.1, 0.0, -0.01, 0.9}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::abs(A(i, j) - expected[i][j]) < 1e-12);

    REQUIRE(r2.ss.B.rows() == 4);
    CHECK(r2.ss.B(3, 0) == doctest::Approx(-0.1));  // (beta1 - 1) I block
    CHECK(r2.ss.extended);
}

TEST_CASE("adaptive-moment extended state reproduces the direct recursion") {
    for (const auto mode : {iplna::AdamMode::scalar, iplna::AdamMode::elementwise}) {
        for (const Eigen::Index n : {Eigen::Index{1}, Eigen::Index{4}}) {
            oracle::TestRng rng(101 + static_cast<int>(n));
            auto state = iplna::make_adam_state(static_cast<std::size_t>(n), 0.01, 0.9,
                                                0.999, 1e-8, mode);
            Vec w = rng.vector(n, -1.0, 1.0);

            // xi(k) = [w(k-1); w(k); m(k-1); m(k)] with the delayed entries
            // seeded to match the learner's first-step convention.
            Vec xi = Vec::Zero(4 * n);
            xi.segment(0, n) = w;
            xi.segment(n, n) = w;

            for (int k = 1; k <= 50; ++k) {
                const Vec g = rng.vector(n, -2.0, 2.0);
                const double y = rng.uniform(-1.0, 1.0);
                auto r = iplna::adam_step(w, g, y, state, k);

                const Vec xi_next = r.ss.A * xi + r.ss.B * r.ss.u;
                Vec expected(4 * n);
                expected.segment(0, n) = w;
                expected.segment(n, n) = r.w_next;
                expected.segment(2 * n, n) = state.m;
                expected.segment(3 * n, n) = r.state.m;
                CHECK((xi_next - expected).cwiseAbs().maxCoeff() < 1e-9);

                xi = xi_next;
                w = r.w_next;
                state = r.state;
            }
        }
    }
}

TEST_CASE("single-sample state reconstruction holds over random streams") {
    oracle::TestRng rng(117);
    iplna::GdState gd;
    gd.mu = 0.05;
    iplna::NgdState ngd;
    ngd.mu = 1.0;
    ngd.eps = 1e-8;

    for (const Eigen::Index n : {Eigen::Index{1}, Eigen::Index{2}, Eigen::Index{8}}) {
        Vec w_gd = rng.vector(n, -1.0, 1.0);
        Vec w_ngd = w_gd;
        Vec w_rls = w_gd;
        auto rls = iplna::make_rls_state(static_cast<std::size_t>(n), 0.99, 100.0);
        for (int k = 0; k < 100; ++k) {
            const Vec g = rng.vector(n, -2.0, 2.0);
            const double y = rng.uniform(-2.0, 2.0);

            auto r1 = iplna::gd_step(w_gd, g, y, gd, k);
            CHECK(reconstruction_gap(w_gd, r1.ss, r1.w_next) < 1e-12);
            w_gd = r1.w_next;

            auto r2 = iplna::ngd_step(w_ngd, g, y, ngd, k);
            CHECK(reconstruction_gap(w_ngd, r2.ss, r2.w_next) < 1e-12);
            w_ngd = r2.w_next;

            auto r3 = iplna::rls_step(w_rls, g, y, rls, k);
            CHECK(reconstruction_gap(w_rls, r3.ss, r3.w_next) < 1e-12);
            w_rls = r3.w_next;
            rls = r3.state;
        }
    }
}

TEST_CASE("batch gradient step reduces to the single-sample step for one row") {
    oracle::TestRng rng(131);
    const Vec w = rng.vector(3, -1.0, 1.0);
    const Vec g = rng.vector(3, -2.0, 2.0);
    const double y = 0.8;

    iplna::GdState s;
    s.mu = 0.1;
    Mat G(1, 3);
    G.row(0) = g;
    const auto batch = iplna::batch_gd_step(w, G, scalar_vec(y), s);
    const auto single = iplna::gd_step(w, g, y, s);
    CHECK((batch.w_next - single.w_next).norm() < 1e-14);
    CHECK((batch.ss.A - single.ss.A).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((batch.ss.u - single.ss.u).norm() < 1e-14);
    REQUIRE(batch.ss.rank1_t.has_value());
    CHECK(*batch.ss.rank1_t == doctest::Approx(*single.ss.rank1_t));
}

TEST_CASE("batch gradient step matches its own decomposition") {
    oracle::TestRng rng(137);
    const Vec w = rng.vector(4, -1.0, 1.0);
    const Mat G = rng.matrix(6, 4, -1.0, 1.0);
    const Vec ys = rng.vector(6, -1.0, 1.0);

    iplna::NgdState s;
    s.mu = 0.5;
    s.eps = 1e-8;
    const auto r = iplna::batch_gd_step(w, G, ys, s);
    CHECK_FALSE(r.ss.rank1_t.has_value());  // six rows: no rank-one shortcut
    CHECK((r.ss.A * w + r.ss.B * r.ss.u - r.w_next).norm() < 1e-12);

    // A should be I - eta G^T G; check against a naive multiply.
    const double eta = 0.5 / (iplna::frobenius_norm(G) * iplna::frobenius_norm(G) + 1e-8);
    const Mat gram = oracle::naive_matmul(G.transpose(), G);
    CHECK((r.ss.A - (Mat::Identity(4, 4) - eta * gram)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("learner inputs are validated and blowups raise the divergence error") {
    iplna::GdState s;
    s.mu = 1.0;
    CHECK_THROWS_AS(iplna::gd_step(Vec::Zero(2), Vec::Zero(3), 1.0, s),
                    std::invalid_argument);
    Vec bad = scalar_vec(std::nan(""));
    CHECK_THROWS_AS(iplna::gd_step(bad, scalar_vec(1.0), 1.0, s), std::invalid_argument);
    s.mu = -0.5;
    CHECK_THROWS_AS(iplna::gd_step(scalar_vec(0.0), scalar_vec(1.0), 1.0, s),
                    std::invalid_argument);

    // Overflowing update: finite inputs whose product is not representable.
    iplna::GdState huge;
    huge.mu = 1.0;
    try {
        (void)iplna::gd_step(scalar_vec(1e308), scalar_vec(1e308), 0.0, huge, 41);
        FAIL("expected a divergence error");
    } catch (const iplna::divergence_error& e) {
        CHECK(e.step() == 41);
    }

    CHECK_THROWS_AS(iplna::make_rls_state(3, 1.5, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_rls_state(3, 0.99, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_adam_state(3, 0.001, 1.0, 0.999, 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_adam_state(3, 0.001, 0.9, 0.999, 0.0),
                    std::invalid_argument);
}

TEST_CASE("learner factory parses the four algorithms and rejects bad specs") {
    const Vec w0 = Vec::Zero(3);
    CHECK(iplna::make_learner("gd:mu=0.1", w0)->name() == "gd");
    CHECK(iplna::make_learner("ngd:mu=1.0,eps=1e-8", w0)->name() == "ngd");
    CHECK(iplna::make_learner("rls:mu=0.99,delta=100", w0)->name() == "rls");
    CHECK(iplna::make_learner("adam:mu=0.001,beta1=0.9,beta2=0.999,eps=1e-8", w0)->name() ==
          "adam");
    CHECK(iplna::make_learner(
              "adam:mu=0.001,beta1=0.9,beta2=0.999,eps=1e-8,mode=elementwise", w0)
              ->name() == "adam");

    CHECK_THROWS_AS(iplna::make_learner("sgd:mu=0.1", w0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_learner("gd:mu=0", w0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_learner("gd:", w0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_learner("ngd:mu=1.0", w0), std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_learner("rls:mu=0.99,delta=100,extra=1", w0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        iplna::make_learner("adam:mu=0.001,beta1=0.9,beta2=0.999,eps=1e-8,mode=fast", w0),
        std::invalid_argument);
    CHECK_THROWS_AS(iplna::make_learner("gd:mu=0.1", Vec()), std::invalid_argument);
}

TEST_CASE("learner wrappers track weights and expose the monitored state norm") {
    oracle::TestRng rng(149);
    Vec w0(2);
    w0 << 0.5, -0.5;

    auto gd = iplna::make_learner("gd:mu=0.1", w0);
    CHECK(gd->initial_state_norm() == doctest::Approx(w0.norm()));

    iplna::GdState s;
    s.mu = 0.1;
    Vec w = w0;
    for (int k = 1; k <= 5; ++k) {
        const Vec x = rng.vector(2, -1.0, 1.0);
        const double y = rng.uniform(-1.0, 1.0);
        const auto direct = iplna::gd_step(w, x, y, s, k);
        const auto out = gd->step(x, x, y, k);
        CHECK((out.w_next - direct.w_next).norm() == 0.0);
        CHECK(out.monitored_norm == doctest::Approx(direct.w_next.norm()));
        w = direct.w_next;
    }
    CHECK((gd->weights() - w).norm() == 0.0);

    // The extended-state learner monitors [w(k); w(k+1); m(k); m(k+1)].
    auto adam = iplna::make_learner("adam:mu=0.001,beta1=0.9,beta2=0.999,eps=1e-8", w0);
    CHECK(adam->initial_state_norm() == doctest::Approx(std::sqrt(2.0) * w0.norm()));
    const auto out = adam->step(w0, w0, 1.0, 1);
    CHECK(out.ss.A.rows() == 8);
    CHECK(out.monitored_norm >= out.w_next.norm());
}
