#include <benchmark/benchmark.h>

#include "agb/learners.hpp"
#include "agb/rng.hpp"

namespace {

agb::TrainingTable table(std::size_t n, std::size_t p, std::uint64_t seed) {
    agb::TrainingTable t;
    for (std::size_t j = 0; j < p; ++j) t.feature_names.push_back("f" + std::to_string(j));
    agb::Rng rng(seed);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : row) v = rng.uniform(0.0, 10.0);
        t.push_row(20.0 * row[0] - 5.0 * row[1] + rng.normal(0.0, 4.0), row, "plot", 2005,
                   0.0, 0.0);
    }
    return t;
}

void BM_FitRf(benchmark::State& state) {
    const auto t = table(static_cast<std::size_t>(state.range(0)), 19, 7);
    agb::RfParams p;
    p.num_trees = 60;
    p.min_node_size = 2;
    p.seed = 3;
    for (auto _ : state) {
        auto m = agb::fit_rf(t, p);
        benchmark::DoNotOptimize(m.get());
    }
}
BENCHMARK(BM_FitRf)->Arg(200)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_FitGbm(benchmark::State& state) {
    const auto t = table(static_cast<std::size_t>(state.range(0)), 19, 8);
    agb::GbmParams p;
    p.num_rounds = 80;
    p.num_leaves = 16;
    p.min_data_in_leaf = 3;
    p.min_data_in_bin = 3;
    for (auto _ : state) {
        auto m = agb::fit_gbm(t, p);
        benchmark::DoNotOptimize(m.get());
    }
}
BENCHMARK(BM_FitGbm)->Arg(200)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_FitSvr(benchmark::State& state) {
    const auto t = table(static_cast<std::size_t>(state.range(0)), 19, 9);
    agb::SvrParams p;
    p.sigma = 0.01;
    p.c = 100.0;
    p.epsilon = 2.0;
    for (auto _ : state) {
        auto m = agb::fit_svr(t, p, false);
        benchmark::DoNotOptimize(m.get());
    }
}
BENCHMARK(BM_FitSvr)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_PredictRf(benchmark::State& state) {
    const auto t = table(400, 19, 10);
    agb::RfParams p;
    p.num_trees = 60;
    const auto m = agb::fit_rf(t, p);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m->predict_row(t.row(i++ % t.rows())));
    }
}
BENCHMARK(BM_PredictRf);

}  // namespace
