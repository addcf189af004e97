#include <cmath>
#include <limits>

#include "agb/error.hpp"
#include "agb/hex.hpp"

namespace agb {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

Vec2 HexTessellation::center(HexId id) const {
    const double R = circumradius();
    const double q = static_cast<double>(id.q);
    const double r = static_cast<double>(id.r);
    if (orientation == HexOrientation::FlatTop)
        return {origin.x + 1.5 * R * q, origin.y + kSqrt3 * R * (r + q / 2.0)};
    return {origin.x + kSqrt3 * R * (q + r / 2.0), origin.y + 1.5 * R * r};
}

HexId HexTessellation::hex_of(Vec2 p) const {
    if (spacing <= 0.0) throw InvalidParams("hex: spacing must be > 0");
    const double R = circumradius();
    const double px = p.x - origin.x;
    const double py = p.y - origin.y;

    // Fractional axial coordinates, then cube rounding.
    double qf, rf;
    if (orientation == HexOrientation::FlatTop) {
        qf = (2.0 / 3.0) * px / R;
        rf = (-px / 3.0 + kSqrt3 / 3.0 * py) / R;
    } else {
        qf = (kSqrt3 / 3.0 * px - py / 3.0) / R;
        rf = (2.0 / 3.0) * py / R;
    }
    double xq = std::round(qf);
    double xr = std::round(rf);
    const double sf = -qf - rf;
    const double xs = std::round(sf);
    const double dq = std::abs(xq - qf);
    const double dr = std::abs(xr - rf);
    const double ds = std::abs(xs - sf);
    if (dq > dr && dq > ds)
        xq = -xr - xs;
    else if (dr > ds)
        xr = -xq - xs;

    // Cube rounding already finds the containing hex almost everywhere;
    // checking the neighbors pins down the boundary-tie rule exactly.
    HexId best{static_cast<std::int64_t>(xq), static_cast<std::int64_t>(xr)};
    const HexId base = best;
    double bestD = std::numeric_limits<double>::infinity();
    static constexpr int kOffsets[7][2] = {{0, 0},  {1, 0},  {1, -1}, {0, -1},
                                           {-1, 0}, {-1, 1}, {0, 1}};
    for (const auto& o : kOffsets) {
        const HexId cand{base.q + o[0], base.r + o[1]};
        const Vec2 c = center(cand);
        const double d = (c.x - p.x) * (c.x - p.x) + (c.y - p.y) * (c.y - p.y);
        if (d < bestD || (d == bestD && cand < best)) {
            bestD = d;
            best = cand;
        }
    }
    return best;
}

Polygon HexTessellation::polygon(HexId id) const {
    const Vec2 c = center(id);
    const double R = circumradius();
    const double offset = orientation == HexOrientation::FlatTop ? 0.0 : kPi / 6.0;
    Ring ring;
    ring.reserve(7);
    for (int k = 0; k < 6; ++k) {
        const double a = offset + kPi / 3.0 * k;
        ring.push_back({c.x + R * std::cos(a), c.y + R * std::sin(a)});
    }
    ring.push_back(ring.front());
    Polygon poly;
    poly.rings.push_back(std::move(ring));
    return poly;
}

std::vector<HexId> hex_assign(std::span<const Vec2> points, const HexTessellation& tess) {
    std::vector<HexId> ids;
    ids.reserve(points.size());
    for (const auto& p : points) ids.push_back(tess.hex_of(p));
    return ids;
}

}  // namespace agb
