#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "agb/geometry.hpp"

namespace agb {

/// FIA subplot geometry: radii of 7.32 m, three outer subplots 36.6 m from
/// the macroplot centroid at azimuths 360, 120 and 240 degrees (clockwise
/// from north).
constexpr double kSubplotRadiusM = 7.32;
constexpr double kSubplotOffsetM = 36.6;
constexpr int kCircleSides = 64;

struct PlotRecord {
    std::string plot_id;
    int year = 0;           // 1990..2019
    double x = 0.0;         // macroplot centroid, meters
    double y = 0.0;
    double agb = 0.0;       // Mg ha^-1, >= 0
    bool fully_forested = false;
    bool true_zero = false; // nonforest, max canopy height <= 1 m; implies agb == 0
    int panel = 1;          // 1..5
};

/// Throws DataError when a record violates the type invariants.
void validate(const PlotRecord& p);

struct PlotFootprint {
    std::string plot_id;
    std::array<Vec2, 4> centers;  // [0] = macroplot centroid

    /// The four subplot circles as 64-gons, in center-first order.
    std::vector<Polygon> subplots() const;

    /// Coverage weights of all four subplots merged (fractions summed per
    /// cell). Throws EmptyIntersection if no subplot touches the grid.
    CoverageWeights coverage(const GridGeoref& geo) const;
};

PlotFootprint build_footprint(const PlotRecord& p);

// Plots CSV: plot_id,year,x,y,agb_mg_ha,fully_forested,true_zero,panel
// (header required, UTF-8, '.' decimal; booleans are "true"/"false").
std::vector<PlotRecord> read_plots_csv(const std::filesystem::path& path);
void write_plots_csv(const std::filesystem::path& path,
                     const std::vector<PlotRecord>& plots);

}  // namespace agb
