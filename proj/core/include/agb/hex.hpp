#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "agb/geometry.hpp"

namespace agb {

/// Axial hexagon address.
struct HexId {
    std::int64_t q = 0;
    std::int64_t r = 0;

    auto operator<=>(const HexId&) const = default;
};

enum class HexOrientation { FlatTop, PointyTop };

/// Regular hexagon tessellation. `spacing` is the centroid-to-centroid
/// distance d of adjacent hexagons; every hexagon has area (sqrt(3)/2) d^2
/// regardless of orientation.
struct HexTessellation {
    double spacing = 0.0;
    Vec2 origin;  // center of hex (0, 0)
    HexOrientation orientation = HexOrientation::FlatTop;

    double circumradius() const { return spacing / 1.7320508075688772; }
    double hex_area() const { return 0.8660254037844386 * spacing * spacing; }

    Vec2 center(HexId id) const;

    /// Hexagon containing the point: the hex with the nearest center.
    /// Boundary ties resolve to the lexicographically smallest (q, r).
    HexId hex_of(Vec2 p) const;

    Polygon polygon(HexId id) const;
};

std::vector<HexId> hex_assign(std::span<const Vec2> points, const HexTessellation& tess);

}  // namespace agb
