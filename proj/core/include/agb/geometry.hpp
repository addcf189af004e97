#pragma once

#include <vector>

#include "agb/grid.hpp"

namespace agb {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Closed ring of vertices; first == last.
using Ring = std::vector<Vec2>;

/// One outer ring plus optional holes, in grid CRS units (meters).
struct Polygon {
    std::vector<Ring> rings;

    const Ring& outer() const { return rings.front(); }

    /// Outer area minus hole areas.
    double area() const;

    /// Axis-aligned bounding box of the outer ring.
    void bbox(double& xmin, double& ymin, double& xmax, double& ymax) const;

    static Polygon rectangle(double xmin, double ymin, double xmax, double ymax);

    /// Regular n-gon inscribed in the circle of the given radius. Used to
    /// rasterize circular subplots (n = 64 keeps the area error < 0.2%).
    static Polygon regular_ngon(Vec2 center, double radius, int n = 64);
};

/// Absolute shoelace area of a ring.
double ring_area(const Ring& r);

/// Sutherland-Hodgman clip of a ring against an axis-aligned rectangle.
Ring clip_ring_to_rect(const Ring& ring, double xmin, double ymin, double xmax,
                       double ymax);

/// Per-cell polygon coverage: fraction of each intersected cell's area.
struct CoverageWeights {
    struct Entry {
        int row;
        int col;
        double fraction;  // in (0, 1]
    };
    std::vector<Entry> entries;

    double total_fraction() const;
    /// Merge another weight set into this one, summing fractions per cell.
    void merge(const CoverageWeights& other);
};

/// Exact polygon-cell intersection fractions by clipping the polygon
/// against every cell square in its bounding box. Throws EmptyIntersection
/// if the polygon misses the grid extent entirely.
CoverageWeights coverage_weights(const Polygon& poly, const GridGeoref& geo);

}  // namespace agb
