#include <algorithm>

#include "agb/csv.hpp"
#include "agb/parallel.hpp"
#include "agb/surface.hpp"

namespace agb {

namespace {

constexpr int kTile = 256;

Grid predict_surface_fn(const PredictorStack& stack,
                        const std::function<double(std::span<const double>)>& fn,
                        int threads) {
    stack.validate();
    Grid out;
    out.geo = stack.geo;
    out.values.assign(stack.geo.size(), out.nodata);

    const int tilesY = (stack.geo.nrows + kTile - 1) / kTile;
    const int tilesX = (stack.geo.ncols + kTile - 1) / kTile;
    parallel_for(static_cast<std::size_t>(tilesY) * tilesX, threads, [&](std::size_t ti) {
        const int ty = static_cast<int>(ti) / tilesX;
        const int tx = static_cast<int>(ti) % tilesX;
        const int r1 = std::min((ty + 1) * kTile, stack.geo.nrows);
        const int c1 = std::min((tx + 1) * kTile, stack.geo.ncols);
        std::vector<double> feats;
        std::string why;
        for (int r = ty * kTile; r < r1; ++r) {
            for (int c = tx * kTile; c < c1; ++c) {
                if (cell_features(stack, r, c, feats, why))
                    out.at(r, c) = static_cast<float>(fn(feats));
            }
        }
    });
    return out;
}

}  // namespace

Grid predict_surface(const Model& m, const PredictorStack& stack, int threads) {
    check_schema(m, stack.schema.feature_hash());
    return predict_surface_fn(
        stack, [&](std::span<const double> x) { return m.predict_row(x); }, threads);
}

Grid predict_surface(const StackedEnsemble& e, const PredictorStack& stack, int threads) {
    for (const auto& c : e.components) check_schema(*c, stack.schema.feature_hash());
    return predict_surface_fn(
        stack, [&](std::span<const double> x) { return e.predict_row(x); }, threads);
}

Grid predict_surface(const AveragedEnsemble& a, const PredictorStack& stack, int threads) {
    for (const auto& c : a.direct.components) check_schema(*c, stack.schema.feature_hash());
    for (const auto& c : a.indirect.components) check_schema(*c, stack.schema.feature_hash());
    return predict_surface_fn(
        stack, [&](std::span<const double> x) { return a.predict_row(x); }, threads);
}

std::vector<AnnualClassRow> annual_series(const std::map<int, Grid>& surfaces,
                                          const std::map<int, ClassGrid>& class_grids) {
    std::vector<AnnualClassRow> rows;
    for (const auto& [year, surf] : surfaces) {
        const auto ci = class_grids.find(year);
        if (ci == class_grids.end())
            throw MissingYearSurface("series: no class grid for year " + std::to_string(year));
        const auto summary = class_summary(surf, ci->second);
        for (int cls : {lcmap::kGrassShrub, lcmap::kTreeCover, lcmap::kWetland}) {
            const auto it = summary.find(cls);
            if (it == summary.end()) continue;
            rows.push_back({year, cls, it->second.mean, it->second.count});
        }
    }
    return rows;
}

Grid stock_change(int a_year, int b_year, const std::map<int, Grid>& surfaces) {
    const auto ai = surfaces.find(a_year);
    const auto bi = surfaces.find(b_year);
    if (ai == surfaces.end())
        throw MissingYearSurface("stock_change: no surface for year " + std::to_string(a_year));
    if (bi == surfaces.end())
        throw MissingYearSurface("stock_change: no surface for year " + std::to_string(b_year));
    return subtract(bi->second, ai->second);
}

std::vector<TrajectoryRow> polygon_trajectory(const Polygon& poly,
                                              const std::map<int, Grid>& surfaces) {
    if (surfaces.empty()) throw DataError("trajectory: no surfaces");
    const CoverageWeights w = coverage_weights(poly, surfaces.begin()->second.geo);
    std::vector<TrajectoryRow> rows;
    for (const auto& [year, surf] : surfaces) {
        if (!(surf.geo == surfaces.begin()->second.geo))
            throw GridMismatch("trajectory: surfaces are not aligned across years");
        rows.push_back({year, weighted_extract(w, surf)});
    }
    return rows;
}

std::map<std::string, Polygon> read_polygons_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto cId = t.col("poly_id"), cRing = t.col("ring"), cX = t.col("x"),
               cY = t.col("y");
    // vertices arrive in file order per (poly, ring)
    std::map<std::string, Polygon> polys;
    for (const auto& r : t.rows) {
        auto& poly = polys[r[cId]];
        const auto ring = static_cast<std::size_t>(std::stoul(r[cRing]));
        if (poly.rings.size() <= ring) poly.rings.resize(ring + 1);
        poly.rings[ring].push_back({std::stod(r[cX]), std::stod(r[cY])});
    }
    for (auto& [id, poly] : polys) {
        for (auto& ring : poly.rings) {
            if (ring.size() < 3) throw DataError("polygon " + id + ": ring too short");
            if (ring.front().x != ring.back().x || ring.front().y != ring.back().y)
                ring.push_back(ring.front());  // close implicitly open rings
        }
    }
    return polys;
}

}  // namespace agb
