#include <benchmark/benchmark.h>

#include <random>

#include "pbmrl/baselines.hpp"
#include "pbmrl/seeding.hpp"

namespace {

using namespace pbmrl;

void bm_feature_map(benchmark::State& state) {
    const int d_f = static_cast<int>(state.range(0));
    const RffParams p = sample_rff(5, d_f, 1.0, 1);
    Eigen::VectorXd z(5);
    z << 0.1, -0.2, 0.3, -0.4, 1.5;
    for (auto _ : state) benchmark::DoNotOptimize(feature_map(p, z));
}
BENCHMARK(bm_feature_map)->Arg(100)->Arg(300)->Arg(1000);

void bm_apply_t(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937_64 rng(2);
    std::normal_distribution<double> gauss;
    BellmanConfig cfg;
    for (int i = 0; i < 2; ++i) {
        Hyperslab slab;
        slab.direction = Eigen::VectorXd::NullaryExpr(
            dim, [&](Eigen::Index) { return gauss(rng); });
        slab.anchor = gauss(rng);
        slab.tolerance = 0.05;
        slab.weight = 0.5;
        cfg.slabs.push_back(std::move(slab));
    }
    Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(
        dim, [&](Eigen::Index) { return gauss(rng); });
    for (auto _ : state) benchmark::DoNotOptimize(apply_t(cfg, q));
}
BENCHMARK(bm_apply_t)->Arg(100)->Arg(300)->Arg(1000);

void bm_lmp_update(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(
        dim, [&](Eigen::Index) { return gauss(rng); });
    LmpState s{Eigen::VectorXd::Zero(dim), 1e-3};
    for (auto _ : state) {
        s = lmp_update(s, x, 1.0, 1.25);
        benchmark::DoNotOptimize(s.theta.data());
    }
}
BENCHMARK(bm_lmp_update)->Arg(20)->Arg(100);

void bm_api_step(benchmark::State& state) {
    ScenarioConfig sc;
    sc.dim = 20;
    sc.n_total = 1 << 16;
    sc.outliers.kind = OutlierModel::Kind::sparse;
    sc.seed = 4;
    const Scenario scenario = generate_scenario(sc);
    const RffParams rff = sample_rff(5, 300, 1.0, 5);
    ApiRuntime rt(ApiConfig{}, rff, sc.dim, 1e-3, 6);
    long n = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rt.step(scenario.x[n], scenario.y[n]));
        n = (n + 1) % scenario.steps();
    }
}
BENCHMARK(bm_api_step);

}  // namespace

BENCHMARK_MAIN();
