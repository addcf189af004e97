#include <benchmark/benchmark.h>

#include "agb/hex.hpp"
#include "agb/metrics.hpp"
#include "agb/rng.hpp"

namespace {

agb::EvalPairs pairs(std::size_t n, std::uint64_t seed) {
    agb::EvalPairs p;
    agb::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = rng.uniform(1.0, 300.0);
        p.push(y, y + rng.normal(0.0, 30.0));
    }
    return p;
}

void BM_PointMetrics(benchmark::State& state) {
    const auto p = pairs(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(agb::point_metrics(p).rmse);
}
BENCHMARK(BM_PointMetrics)->Arg(545)->Arg(20000);

void BM_BootstrapMetrics(benchmark::State& state) {
    const auto p = pairs(545, 5);
    for (auto _ : state) benchmark::DoNotOptimize(agb::metrics(p, 1000, 1).se_rmse);
}
BENCHMARK(BM_BootstrapMetrics)->Unit(benchmark::kMillisecond);

void BM_HexAssign(benchmark::State& state) {
    agb::Rng rng(6);
    std::vector<agb::Vec2> pts(20000);
    for (auto& p : pts) {
        p.x = rng.uniform(0.0, 400000.0);
        p.y = rng.uniform(0.0, 400000.0);
    }
    const agb::HexTessellation tess{20000.0, {0.0, 0.0}};
    for (auto _ : state) {
        auto ids = agb::hex_assign(pts, tess);
        benchmark::DoNotOptimize(ids.data());
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_HexAssign);

}  // namespace
