#pragma once

#include <map>

#include "agb/geometry.hpp"
#include "agb/grid.hpp"

namespace agb {

/// Coverage-weighted mean of grid values: sum(f*v)/sum(f) over cells with
/// valid values. Returns g.nodata when every covered cell is nodata.
double weighted_extract(const CoverageWeights& w, const Grid& g);

/// Class with the greatest summed coverage fraction; ties break to the
/// smallest code. Cells with code 0 are excluded; throws AllNodata when
/// nothing remains.
std::uint8_t majority_class(const CoverageWeights& w, const ClassGrid& cg);

/// Copy of `agb` with developed, cropland, water, barren and class-nodata
/// cells set to nodata. Idempotent.
Grid mask_nonvegetated(const Grid& agb, const ClassGrid& cg);

/// Cellwise a - b; nodata in either operand propagates.
Grid subtract(const Grid& a, const Grid& b);

struct ClassStat {
    double mean = 0.0;
    std::int64_t count = 0;
};

/// Mean of valid cells per class code (codes 1..7; code 0 is nodata).
/// Classes with no valid cells are omitted.
std::map<int, ClassStat> class_summary(const Grid& agb, const ClassGrid& cg);

}  // namespace agb
