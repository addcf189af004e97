#pragma once

#include <functional>
#include <map>

#include "agb/grid_ops.hpp"
#include "agb/model.hpp"
#include "agb/stacking.hpp"

namespace agb {

/// Per-cell prediction over an aligned predictor stack. Cells with any
/// nodata predictor come out as nodata; georeferencing is copied from the
/// stack. Evaluation is tiled (256x256) and may run across threads with
/// bit-identical results.
Grid predict_surface(const Model& m, const PredictorStack& stack, int threads = 1);
Grid predict_surface(const StackedEnsemble& e, const PredictorStack& stack, int threads = 1);
Grid predict_surface(const AveragedEnsemble& a, const PredictorStack& stack, int threads = 1);

struct AnnualClassRow {
    int year = 0;
    int landcover = 0;
    double mean_agb = 0.0;
    std::int64_t cell_count = 0;
};

/// Per-year mean AGB over the vegetated classes (grass/shrub, tree cover,
/// wetland). Surfaces and class grids are matched by year.
std::vector<AnnualClassRow> annual_series(const std::map<int, Grid>& surfaces,
                                          const std::map<int, ClassGrid>& class_grids);

/// Stock change: surfaces[b_year] - surfaces[a_year] (later minus earlier).
Grid stock_change(int a_year, int b_year, const std::map<int, Grid>& surfaces);

struct TrajectoryRow {
    int year = 0;
    double mean_agb = 0.0;
};

/// Coverage-weighted mean AGB of one polygon per year.
std::vector<TrajectoryRow> polygon_trajectory(const Polygon& poly,
                                              const std::map<int, Grid>& surfaces);

/// Polygons CSV: poly_id,ring,x,y with vertices in order (ring 0 = outer).
std::map<std::string, Polygon> read_polygons_csv(const std::filesystem::path& path);

}  // namespace agb
