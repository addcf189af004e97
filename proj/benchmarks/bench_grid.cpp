#include <benchmark/benchmark.h>

#include "agb/grid_ops.hpp"
#include "agb/plots.hpp"
#include "agb/rng.hpp"

namespace {

agb::GridGeoref geo(int n) {
    agb::GridGeoref g;
    g.nrows = n;
    g.ncols = n;
    g.cellsize = 30.0;
    g.crs_tag = "bench";
    return g;
}

void BM_CoverageCircle(benchmark::State& state) {
    const auto g = geo(64);
    const auto poly = agb::Polygon::regular_ngon({960.0, 960.0}, 7.32, 64);
    for (auto _ : state) {
        auto w = agb::coverage_weights(poly, g);
        benchmark::DoNotOptimize(w.entries.data());
    }
}
BENCHMARK(BM_CoverageCircle);

void BM_FootprintCoverage(benchmark::State& state) {
    const auto g = geo(64);
    agb::PlotRecord p;
    p.plot_id = "B";
    p.year = 2005;
    p.x = 960.0;
    p.y = 960.0;
    const auto f = agb::build_footprint(p);
    for (auto _ : state) {
        auto w = f.coverage(g);
        benchmark::DoNotOptimize(w.entries.data());
    }
}
BENCHMARK(BM_FootprintCoverage);

void BM_MaskNonvegetated(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    agb::Grid surf = agb::Grid::filled(geo(n), 100.0f);
    agb::ClassGrid cls = agb::ClassGrid::filled(geo(n), agb::lcmap::kTreeCover);
    agb::Rng rng(1);
    for (auto& c : cls.codes) c = static_cast<std::uint8_t>(1 + rng.below(7));
    for (auto _ : state) {
        auto m = agb::mask_nonvegetated(surf, cls);
        benchmark::DoNotOptimize(m.values.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_MaskNonvegetated)->Arg(256)->Arg(1024);

}  // namespace
