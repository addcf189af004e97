#pragma once

#include <map>
#include <optional>

#include "agb/grid_ops.hpp"
#include "agb/hex.hpp"
#include "agb/metrics.hpp"
#include "agb/plots.hpp"
#include "agb/table.hpp"

namespace agb {

/// One assessment plot paired with the coincident (footprint-weighted)
/// map prediction from its inventory year.
struct PlotPixelPair {
    std::string plot_id;
    Vec2 pos;
    double ref = 0.0;
    double pred = 0.0;
    int landcover = 0;  // majority LCMAP class at the plot
};

struct ScaleMetrics {
    std::string label;      // "plot:pixel" or spacing in km
    double spacing_m = 0.0; // 0 for plot:pixel
    std::size_t n = 0;      // comparison units (plots or hexes)
    double pph = 0.0;       // mean plots per included hexagon (0 at plot:pixel)
    MetricSet metrics;
    GmfrLine gmfr;
    bool gmfr_ok = false;
    EvalPairs pairs;        // retained for scatter reports
};

struct ClassMetrics {
    int landcover = 0;
    std::size_t n = 0;
    MetricSet metrics;
};

/// Residual summaries within one hexagon (plot-to-pixel residuals of the
/// contained plots).
struct HexResidualStat {
    HexId id;
    std::size_t count = 0;
    double mean_ref = 0.0;
    double mae = 0.0;
    double prmse = 0.0;  // 100 * rmse / mean_ref within the hex
    double me = 0.0;
};

struct AgreementReport {
    std::string model_label;
    std::vector<PlotPixelPair> pairs;
    std::vector<ScaleMetrics> scales;  // [0] is plot:pixel
    std::vector<ClassMetrics> per_class;
    std::vector<HexResidualStat> hex_residuals;  // at residual_spacing_m
    double residual_spacing_m = 50000.0;
    std::size_t excluded_single_plot_hexes = 0;
    std::vector<DroppedRow> skipped_plots;
};

struct RiemannOptions {
    std::string model_label = "model";
    int boot_iters = 1000;
    std::uint64_t seed = 0;
    std::optional<Vec2> hex_origin;       // default: plot bounding-box lower-left
    HexOrientation hex_orientation = HexOrientation::FlatTop;
    double residual_spacing_m = 50000.0;  // per-hex residual summary scale
};

/// Plot-to-pixel pairing of each assessment plot with its year's surface,
/// hexagon aggregation at every requested spacing, per-landcover metrics
/// at the plot:pixel scale, and per-hex residual summaries (single-plot
/// hexes excluded there, and only there).
AgreementReport riemann_assessment(const std::vector<PlotRecord>& plots,
                                   const std::map<int, Grid>& surfaces,
                                   const std::map<int, ClassGrid>& class_grids,
                                   const std::vector<double>& scales_m,
                                   const RiemannOptions& opts = {});

/// Pair each plot with the coincident masked-map prediction (the first
/// stage of riemann_assessment, exposed for reuse).
std::vector<PlotPixelPair> plot_pixel_pairs(const std::vector<PlotRecord>& plots,
                                            const std::map<int, Grid>& surfaces,
                                            const std::map<int, ClassGrid>& class_grids,
                                            std::vector<DroppedRow>& skipped);

/// Per-hex residual stats over the given pairs; hexes with fewer than
/// min_count plots are dropped and tallied in `excluded`.
std::vector<HexResidualStat> hex_residual_stats(std::span<const PlotPixelPair> pairs,
                                                const HexTessellation& tess,
                                                std::size_t min_count,
                                                std::size_t* excluded = nullptr);

// ---------------------------------------------------------------------------
// Menlove-Healey style small-area comparison
// ---------------------------------------------------------------------------

struct SmallAreaHex {
    std::string hex_id;
    Vec2 center;
    double fia_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SmallAreaRow {
    std::string hex_id;
    double mapped_mean = 0.0;    // coverage-weighted mean of the masked surface
    double veg_fraction = 0.0;   // vegetated share of the hex area
    double adj_estimate = 0.0;   // fia_estimate / veg_fraction
    double adj_ci_low = 0.0;
    double adj_ci_high = 0.0;
    bool inside_ci = false;
};

struct SmallAreaResult {
    std::vector<SmallAreaRow> rows;
    std::vector<DroppedRow> skipped;
    double pct_inside_ci = 0.0;
};

/// Compares coverage-weighted means of a masked AGB surface against
/// FIA-derived hexagon estimates adjusted by each hexagon's vegetated
/// fraction. Hexagons with a majority of their area outside the mapped
/// extent, or with zero vegetated fraction, are skipped and logged.
SmallAreaResult small_area_comparison(const Grid& masked_surface, const ClassGrid& cg,
                                      const std::vector<SmallAreaHex>& hexes,
                                      double spacing_m,
                                      HexOrientation orientation = HexOrientation::FlatTop);

std::vector<SmallAreaHex> read_small_area_csv(const std::filesystem::path& path);

}  // namespace agb
