#include <algorithm>
#include <cmath>

#include "agb/geometry.hpp"

namespace agb {

double ring_area(const Ring& r) {
    double twice = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        twice += r[i].x * r[i + 1].y - r[i + 1].x * r[i].y;
    return std::abs(twice) / 2.0;
}

double Polygon::area() const {
    if (rings.empty()) return 0.0;
    double a = ring_area(rings.front());
    for (std::size_t i = 1; i < rings.size(); ++i) a -= ring_area(rings[i]);
    return a;
}

void Polygon::bbox(double& xmin, double& ymin, double& xmax, double& ymax) const {
    const Ring& r = outer();
    xmin = ymin = std::numeric_limits<double>::infinity();
    xmax = ymax = -std::numeric_limits<double>::infinity();
    for (const auto& p : r) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
}

Polygon Polygon::rectangle(double xmin, double ymin, double xmax, double ymax) {
    Polygon p;
    p.rings.push_back(Ring{{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}, {xmin, ymin}});
    return p;
}

Polygon Polygon::regular_ngon(Vec2 center, double radius, int n) {
    Polygon p;
    Ring r;
    r.reserve(n + 1);
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * 3.14159265358979323846 * i / n;
        r.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    r.push_back(r.front());
    p.rings.push_back(std::move(r));
    return p;
}

namespace {

enum class Edge { Left, Right, Bottom, Top };

bool inside(const Vec2& p, Edge e, double bound) {
    switch (e) {
        case Edge::Left: return p.x >= bound;
        case Edge::Right: return p.x <= bound;
        case Edge::Bottom: return p.y >= bound;
        case Edge::Top: return p.y <= bound;
    }
    return false;
}

Vec2 intersect(const Vec2& a, const Vec2& b, Edge e, double bound) {
    if (e == Edge::Left || e == Edge::Right) {
        const double t = (bound - a.x) / (b.x - a.x);
        return {bound, a.y + t * (b.y - a.y)};
    }
    const double t = (bound - a.y) / (b.y - a.y);
    return {a.x + t * (b.x - a.x), bound};
}

Ring clip_edge(const Ring& in, Edge e, double bound) {
    Ring out;
    if (in.size() < 2) return out;
    out.reserve(in.size() + 4);
    // `in` is closed (first == last); iterate its edges.
    for (std::size_t i = 0; i + 1 < in.size(); ++i) {
        const Vec2& cur = in[i];
        const Vec2& nxt = in[i + 1];
        const bool cin = inside(cur, e, bound);
        const bool nin = inside(nxt, e, bound);
        if (cin) out.push_back(cur);
        if (cin != nin) out.push_back(intersect(cur, nxt, e, bound));
    }
    if (!out.empty()) out.push_back(out.front());
    return out;
}

}  // namespace

Ring clip_ring_to_rect(const Ring& ring, double xmin, double ymin, double xmax,
                       double ymax) {
    Ring r = clip_edge(ring, Edge::Left, xmin);
    r = clip_edge(r, Edge::Right, xmax);
    r = clip_edge(r, Edge::Bottom, ymin);
    r = clip_edge(r, Edge::Top, ymax);
    return r;
}

double CoverageWeights::total_fraction() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.fraction;
    return s;
}

void CoverageWeights::merge(const CoverageWeights& other) {
    for (const auto& oe : other.entries) {
        bool found = false;
        for (auto& e : entries) {
            if (e.row == oe.row && e.col == oe.col) {
                e.fraction = std::min(1.0, e.fraction + oe.fraction);
                found = true;
                break;
            }
        }
        if (!found) entries.push_back(oe);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
}

CoverageWeights coverage_weights(const Polygon& poly, const GridGeoref& geo) {
    if (poly.rings.empty() || poly.outer().size() < 4)
        throw DataError("coverage_weights: degenerate polygon");
    double xmin, ymin, xmax, ymax;
    poly.bbox(xmin, ymin, xmax, ymax);

    // Cell index range of the bounding box, clamped to the grid.
    const int c0 = std::max(0, static_cast<int>(std::floor((xmin - geo.xll) / geo.cellsize)));
    const int c1 = std::min(geo.ncols - 1,
                            static_cast<int>(std::floor((xmax - geo.xll) / geo.cellsize)));
    const int rTop = std::max(0, geo.nrows - 1 -
                                     static_cast<int>(std::floor((ymax - geo.yll) / geo.cellsize)));
    const int rBot = std::min(geo.nrows - 1,
                              geo.nrows - 1 -
                                  static_cast<int>(std::floor((ymin - geo.yll) / geo.cellsize)));

    const double cellArea = geo.cellsize * geo.cellsize;
    CoverageWeights w;
    for (int r = rTop; r <= rBot; ++r) {
        const double cyMax = geo.yll + (geo.nrows - r) * geo.cellsize;
        const double cyMin = cyMax - geo.cellsize;
        for (int c = c0; c <= c1; ++c) {
            const double cxMin = geo.xll + c * geo.cellsize;
            const double cxMax = cxMin + geo.cellsize;
            double a = ring_area(clip_ring_to_rect(poly.outer(), cxMin, cyMin, cxMax, cyMax));
            for (std::size_t h = 1; h < poly.rings.size(); ++h)
                a -= ring_area(clip_ring_to_rect(poly.rings[h], cxMin, cyMin, cxMax, cyMax));
            const double f = a / cellArea;
            if (f > 1e-12) w.entries.push_back({r, c, std::min(1.0, f)});
        }
    }
    if (w.entries.empty())
        throw EmptyIntersection("polygon does not intersect the grid extent");
    return w;
}

}  // namespace agb
