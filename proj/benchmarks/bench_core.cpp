// Microbenchmarks for the per-step hot path: learner updates, feature
// expansion, window products, spectral estimates, and the full monitor
// observation. Dimensions are swept over the range the CLI typically runs.

#include <benchmark/benchmark.h>

#include "iplna/architectures.hpp"
#include "iplna/learners.hpp"
#include "iplna/linalg.hpp"
#include "iplna/monitor.hpp"

#include <random>
#include <vector>

using iplna::Mat;
using iplna::Vec;

namespace {

Vec random_vec(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(gen);
    return v;
}

void BM_GdStep(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const iplna::GdState s{0.1};
    Vec w = random_vec(n, 1);
    const Vec g = random_vec(n, 2);
    long k = 0;
    for (auto _ : state) {
        auto r = iplna::gd_step(w, g, 0.5, s, ++k);
        benchmark::DoNotOptimize(r.ss.A.data());
        w = std::move(r.w_next);
    }
}
BENCHMARK(BM_GdStep)->Arg(4)->Arg(16)->Arg(64);

void BM_NgdStep(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const iplna::NgdState s{1.0, 1e-8};
    Vec w = random_vec(n, 1);
    const Vec g = random_vec(n, 2);
    long k = 0;
    for (auto _ : state) {
        auto r = iplna::ngd_step(w, g, 0.5, s, ++k);
        benchmark::DoNotOptimize(r.ss.A.data());
        w = std::move(r.w_next);
    }
}
BENCHMARK(BM_NgdStep)->Arg(4)->Arg(16)->Arg(64);

void BM_RlsStep(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    auto s = iplna::make_rls_state(static_cast<std::size_t>(n), 0.99, 100.0);
    Vec w = random_vec(n, 1);
    const Vec g = random_vec(n, 2);
    long k = 0;
    for (auto _ : state) {
        auto r = iplna::rls_step(w, g, 0.5, s, ++k);
        benchmark::DoNotOptimize(r.ss.A.data());
        w = std::move(r.w_next);
        s = std::move(r.state);
    }
}
BENCHMARK(BM_RlsStep)->Arg(4)->Arg(16)->Arg(64);

void BM_AdamStep(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    auto s = iplna::make_adam_state(static_cast<std::size_t>(n), 0.01);
    Vec w = random_vec(n, 1);
    const Vec g = random_vec(n, 2);
    long k = 0;
    for (auto _ : state) {
        auto r = iplna::adam_step(w, g, 0.5, s, ++k);
        benchmark::DoNotOptimize(r.ss.A.data());
        w = std::move(r.w_next);
        s = std::move(r.state);
    }
}
BENCHMARK(BM_AdamStep)->Arg(4)->Arg(16);

void BM_HonuFeatures(benchmark::State& state) {
    const auto dim = state.range(0);
    const auto map = iplna::parse_arch("honu:order=2,dim=" + std::to_string(dim));
    const Vec x = random_vec(dim, 3);
    for (auto _ : state) {
        Vec g = map(x);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_HonuFeatures)->Arg(4)->Arg(8)->Arg(16);

void BM_RvflFeatures(benchmark::State& state) {
    const auto hidden = state.range(0);
    const auto map = iplna::parse_arch("rvfl:dim=8,hidden=" + std::to_string(hidden) +
                                       ",act=tanh,seed=7");
    const Vec x = random_vec(8, 3);
    for (auto _ : state) {
        Vec g = map(x);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_RvflFeatures)->Arg(16)->Arg(64)->Arg(256);

void BM_WindowProduct(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::vector<Mat> window;
    for (int i = 0; i < 50; ++i) {
        const Vec g = random_vec(n, 10 + i);
        window.push_back(Mat::Identity(n, n) - 0.5 * (g * g.transpose()));
    }
    for (auto _ : state) {
        Mat p = iplna::window_product(window);
        benchmark::DoNotOptimize(p.data());
    }
}
BENCHMARK(BM_WindowProduct)->Arg(4)->Arg(16);

void BM_SpectralNormEst(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Vec g = random_vec(n, 4);
    const Mat A = Mat::Identity(n, n) - 0.5 * (g * g.transpose());
    for (auto _ : state) {
        benchmark::DoNotOptimize(iplna::spectral_norm_est(A));
    }
}
BENCHMARK(BM_SpectralNormEst)->Arg(4)->Arg(16)->Arg(64);

void BM_SpectralRadiusEst(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Vec g = random_vec(n, 4);
    const Mat A = Mat::Identity(n, n) - 0.5 * (g * g.transpose());
    for (auto _ : state) {
        benchmark::DoNotOptimize(iplna::spectral_radius_est(A).value);
    }
}
BENCHMARK(BM_SpectralRadiusEst)->Arg(4)->Arg(16)->Arg(64);

// Full monitor observation of an NGD stream: per-step norms, window product,
// running bounds. Dominated by the window product at the default p = 50.
void BM_MonitorObserve(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const iplna::NgdState s{1.0, 1e-8};
    iplna::MonitorConfig cfg;
    iplna::StabilityMonitor mon(cfg, 0.0);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Vec w = Vec::Zero(n);
    long k = 0;
    for (auto _ : state) {
        Vec g(n);
        for (Eigen::Index i = 0; i < n; ++i) g(i) = d(gen);
        auto r = iplna::ngd_step(w, g, d(gen), s, ++k);
        benchmark::DoNotOptimize(mon.observe(r.ss, r.w_next.norm()).k);
        w = std::move(r.w_next);
    }
}
BENCHMARK(BM_MonitorObserve)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
