#include <array>

#include "agb/grid_ops.hpp"

namespace agb {

namespace {

void require_aligned(const GridGeoref& a, const GridGeoref& b, const char* op) {
    if (!(a == b)) throw GridMismatch(std::string(op) + ": grids are not aligned");
}

void require_in_bounds(const CoverageWeights& w, const GridGeoref& geo, const char* op) {
    for (const auto& e : w.entries)
        if (e.row < 0 || e.row >= geo.nrows || e.col < 0 || e.col >= geo.ncols)
            throw DataError(std::string(op) + ": coverage weight out of bounds");
}

}  // namespace

double weighted_extract(const CoverageWeights& w, const Grid& g) {
    require_in_bounds(w, g.geo, "weighted_extract");
    double num = 0.0, den = 0.0;
    for (const auto& e : w.entries) {
        const float v = g.at(e.row, e.col);
        if (g.is_nodata(v)) continue;
        num += e.fraction * static_cast<double>(v);
        den += e.fraction;
    }
    if (den == 0.0) return g.nodata;
    return num / den;
}

std::uint8_t majority_class(const CoverageWeights& w, const ClassGrid& cg) {
    require_in_bounds(w, cg.geo, "majority_class");
    std::array<double, lcmap::kMaxCode + 1> frac{};
    for (const auto& e : w.entries) frac[cg.at(e.row, e.col)] += e.fraction;
    std::uint8_t best = 0;
    double bestFrac = 0.0;
    for (std::uint8_t c = 1; c <= lcmap::kMaxCode; ++c) {
        if (frac[c] > bestFrac) {  // strict: ties keep the smaller code
            bestFrac = frac[c];
            best = c;
        }
    }
    if (best == 0) throw AllNodata("majority_class: every covered cell is class 0");
    return best;
}

Grid mask_nonvegetated(const Grid& agb, const ClassGrid& cg) {
    require_aligned(agb.geo, cg.geo, "mask_nonvegetated");
    Grid out = agb;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!lcmap::vegetated(cg.codes[i])) out.values[i] = out.nodata;
    return out;
}

Grid subtract(const Grid& a, const Grid& b) {
    require_aligned(a.geo, b.geo, "subtract");
    Grid out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const float av = a.values[i];
        const float bv = b.values[i];
        if (a.is_nodata(av) || b.is_nodata(bv))
            out.values[i] = out.nodata;
        else
            out.values[i] = av - bv;
    }
    return out;
}

std::map<int, ClassStat> class_summary(const Grid& agb, const ClassGrid& cg) {
    require_aligned(agb.geo, cg.geo, "class_summary");
    std::array<double, lcmap::kMaxCode + 1> sum{};
    std::array<std::int64_t, lcmap::kMaxCode + 1> count{};
    for (std::size_t i = 0; i < agb.values.size(); ++i) {
        const float v = agb.values[i];
        if (agb.is_nodata(v)) continue;
        const std::uint8_t c = cg.codes[i];
        if (c == lcmap::kNodata) continue;
        sum[c] += v;
        count[c] += 1;
    }
    std::map<int, ClassStat> out;
    for (int c = 1; c <= lcmap::kMaxCode; ++c)
        if (count[c] > 0) out[c] = {sum[c] / count[c], count[c]};
    return out;
}

}  // namespace agb
