#pragma once

#include <filesystem>
#include <optional>

#include "agb/metrics.hpp"

namespace agb {

struct ScatterOptions {
    std::string title;
    std::optional<double> cap;  // clamp displayed values, never stored data
    int size_px = 520;
};

/// Reference-vs-predicted scatter with the 1:1 line (solid) and the GMFR
/// trend line (dashed). The GMFR parameters and pair count are embedded in
/// the SVG <metadata> element; each point carries data-ref/data-pred
/// attributes with the displayed (possibly capped) values.
void write_scatter_svg(const std::filesystem::path& path, const EvalPairs& pairs,
                       const GmfrLine& line, bool gmfr_ok, const ScatterOptions& opts = {});

}  // namespace agb
