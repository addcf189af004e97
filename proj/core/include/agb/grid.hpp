#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agb/error.hpp"

namespace agb {

/// Georeferencing shared by all grid types. (xll, yll) is the lower-left
/// corner of the extent in CRS units (meters); rows run north to south.
struct GridGeoref {
    int nrows = 0;
    int ncols = 0;
    double xll = 0.0;
    double yll = 0.0;
    double cellsize = 30.0;
    std::string crs_tag;

    bool operator==(const GridGeoref&) const = default;

    double xmax() const { return xll + ncols * cellsize; }
    double ymax() const { return yll + nrows * cellsize; }

    /// Cell center coordinates. Row 0 is the northernmost row.
    double cell_x(int col) const { return xll + (col + 0.5) * cellsize; }
    double cell_y(int row) const { return yll + (nrows - row - 0.5) * cellsize; }

    /// Containing cell of a point; points on a cell boundary fall into the
    /// cell with the larger column / more southern row index.
    bool contains(double x, double y) const {
        return x >= xll && x < xmax() && y >= yll && y < ymax();
    }
    int col_of(double x) const { return static_cast<int>(std::floor((x - xll) / cellsize)); }
    int row_of(double y) const {
        return nrows - 1 - static_cast<int>(std::floor((y - yll) / cellsize));
    }

    std::size_t size() const { return static_cast<std::size_t>(nrows) * ncols; }
};

/// Single-band real-valued raster with a nodata sentinel. Values are stored
/// row-major, north-to-south, as 32-bit floats to match the on-disk format.
struct Grid {
    GridGeoref geo;
    float nodata = -9999.0f;
    std::vector<float> values;

    float at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * geo.ncols + col];
    }
    float& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * geo.ncols + col];
    }
    bool is_nodata(float v) const { return v == nodata; }
    bool aligned_with(const GridGeoref& other) const { return geo == other; }

    static Grid filled(const GridGeoref& geo, float value, float nodata = -9999.0f) {
        Grid g;
        g.geo = geo;
        g.nodata = nodata;
        g.values.assign(geo.size(), value);
        return g;
    }
};

/// LCMAP landcover codes used throughout.
namespace lcmap {
constexpr std::uint8_t kNodata = 0;
constexpr std::uint8_t kDeveloped = 1;
constexpr std::uint8_t kCropland = 2;
constexpr std::uint8_t kGrassShrub = 3;
constexpr std::uint8_t kTreeCover = 4;
constexpr std::uint8_t kWater = 5;
constexpr std::uint8_t kWetland = 6;
constexpr std::uint8_t kBarren = 7;
constexpr std::uint8_t kMaxCode = 7;

inline bool vegetated(std::uint8_t c) {
    return c == kGrassShrub || c == kTreeCover || c == kWetland;
}
}  // namespace lcmap

/// Small-integer class raster (LCMAP codes). Code 0 is nodata.
struct ClassGrid {
    GridGeoref geo;
    std::vector<std::uint8_t> codes;

    std::uint8_t at(int row, int col) const {
        return codes[static_cast<std::size_t>(row) * geo.ncols + col];
    }
    std::uint8_t& at(int row, int col) {
        return codes[static_cast<std::size_t>(row) * geo.ncols + col];
    }
    bool aligned_with(const GridGeoref& other) const { return geo == other; }

    static ClassGrid filled(const GridGeoref& geo, std::uint8_t code) {
        ClassGrid g;
        g.geo = geo;
        g.codes.assign(geo.size(), code);
        return g;
    }
};

// On-disk format: `<base>.bin` holds raw little-endian IEEE-754 float32,
// row-major, north-to-south; `<base>.json` is the sidecar header
// {nrows, ncols, xll, yll, cellsize, nodata, crs_tag, kind}.
void write_grid(const std::filesystem::path& base, const Grid& g);
void write_class_grid(const std::filesystem::path& base, const ClassGrid& g);
Grid read_grid(const std::filesystem::path& base);
ClassGrid read_class_grid(const std::filesystem::path& base);

}  // namespace agb
