#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "agb/assessment.hpp"
#include "agb/csv.hpp"
#include "agb/rng.hpp"

namespace agb {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Metrics that degrade gracefully on tiny pair sets instead of throwing:
/// hexagon scales can legitimately collapse to one unit.
MetricSet metrics_or_partial(const EvalPairs& p, int boot_iters, std::uint64_t seed) {
    if (p.n() >= 2) return metrics(p, boot_iters, seed);
    MetricSet m = point_metrics(p);
    return m;
}

ScaleMetrics make_scale(const std::string& label, double spacing, const EvalPairs& pairs,
                        double pph, int boot_iters, std::uint64_t seed) {
    ScaleMetrics s;
    s.label = label;
    s.spacing_m = spacing;
    s.n = pairs.n();
    s.pph = pph;
    s.pairs = pairs;
    s.metrics = metrics_or_partial(pairs, boot_iters, seed);
    try {
        s.gmfr = gmfr(pairs);
        s.gmfr_ok = true;
    } catch (const DegenerateInput&) {
        s.gmfr = {kNan, kNan};
        s.gmfr_ok = false;
    }
    return s;
}

std::string km_label(double spacing_m) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g km", spacing_m / 1000.0);
    return buf;
}

}  // namespace

std::vector<PlotPixelPair> plot_pixel_pairs(const std::vector<PlotRecord>& plots,
                                            const std::map<int, Grid>& surfaces,
                                            const std::map<int, ClassGrid>& class_grids,
                                            std::vector<DroppedRow>& skipped) {
    std::vector<PlotPixelPair> pairs;
    pairs.reserve(plots.size());
    for (const auto& p : plots) {
        const auto si = surfaces.find(p.year);
        if (si == surfaces.end())
            throw MissingYearSurface("no surface for plot year " + std::to_string(p.year));
        const auto ci = class_grids.find(p.year);
        if (ci == class_grids.end())
            throw MissingYearSurface("no class grid for plot year " + std::to_string(p.year));

        CoverageWeights w;
        try {
            w = build_footprint(p).coverage(si->second.geo);
        } catch (const EmptyIntersection&) {
            skipped.push_back({p.plot_id, "footprint outside mapped extent"});
            continue;
        }
        const double pred = weighted_extract(w, si->second);
        if (pred == si->second.nodata) {
            // plots outside the masked map population are not compared
            skipped.push_back({p.plot_id, "footprint entirely masked"});
            continue;
        }
        PlotPixelPair pair;
        pair.plot_id = p.plot_id;
        pair.pos = {p.x, p.y};
        pair.ref = p.agb;
        pair.pred = pred;
        try {
            pair.landcover = majority_class(w, ci->second);
        } catch (const AllNodata&) {
            pair.landcover = 0;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<HexResidualStat> hex_residual_stats(std::span<const PlotPixelPair> pairs,
                                                const HexTessellation& tess,
                                                std::size_t min_count,
                                                std::size_t* excluded) {
    std::map<HexId, std::vector<const PlotPixelPair*>> groups;
    for (const auto& p : pairs) groups[tess.hex_of(p.pos)].push_back(&p);

    std::vector<HexResidualStat> stats;
    std::size_t dropped = 0;
    for (const auto& [id, members] : groups) {
        if (members.size() < min_count) {
            ++dropped;
            continue;
        }
        HexResidualStat h;
        h.id = id;
        h.count = members.size();
        double sae = 0.0, sse = 0.0, se = 0.0, sref = 0.0;
        for (const auto* p : members) {
            const double e = p->ref - p->pred;
            sae += std::abs(e);
            sse += e * e;
            se += e;
            sref += p->ref;
        }
        const double n = static_cast<double>(members.size());
        h.mean_ref = sref / n;
        h.mae = sae / n;
        h.me = se / n;
        h.prmse = h.mean_ref != 0.0 ? 100.0 * std::sqrt(sse / n) / h.mean_ref : kNan;
        stats.push_back(h);
    }
    if (excluded) *excluded = dropped;
    return stats;
}

AgreementReport riemann_assessment(const std::vector<PlotRecord>& plots,
                                   const std::map<int, Grid>& surfaces,
                                   const std::map<int, ClassGrid>& class_grids,
                                   const std::vector<double>& scales_m,
                                   const RiemannOptions& opts) {
    AgreementReport rep;
    rep.model_label = opts.model_label;
    rep.residual_spacing_m = opts.residual_spacing_m;
    rep.pairs = plot_pixel_pairs(plots, surfaces, class_grids, rep.skipped_plots);
    if (rep.pairs.empty()) throw DataError("assessment: no usable plots");

    // plot:pixel scale
    EvalPairs pp;
    for (const auto& p : rep.pairs) pp.push(p.ref, p.pred);
    rep.scales.push_back(make_scale("plot:pixel", 0.0, pp, 0.0, opts.boot_iters,
                                    derive_seed(opts.seed, "scale:pp")));

    // hex origin: data bounding-box lower-left unless overridden
    Vec2 origin;
    if (opts.hex_origin) {
        origin = *opts.hex_origin;
    } else {
        origin = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
        for (const auto& p : rep.pairs) {
            origin.x = std::min(origin.x, p.pos.x);
            origin.y = std::min(origin.y, p.pos.y);
        }
    }

    for (double d : scales_m) {
        const HexTessellation tess{d, origin, opts.hex_orientation};
        std::map<HexId, std::pair<EvalPairs, std::size_t>> groups;
        for (const auto& p : rep.pairs) {
            auto& g = groups[tess.hex_of(p.pos)];
            g.first.push(p.ref, p.pred);
            g.second += 1;
        }
        EvalPairs hexPairs;
        std::size_t totalPlots = 0;
        for (const auto& [id, g] : groups) {
            double mr = 0.0, mp = 0.0;
            for (std::size_t i = 0; i < g.first.n(); ++i) {
                mr += g.first.ref[i];
                mp += g.first.pred[i];
            }
            const double n = static_cast<double>(g.first.n());
            hexPairs.push(mr / n, mp / n);
            totalPlots += g.second;
        }
        const double pph =
            static_cast<double>(totalPlots) / static_cast<double>(groups.size());
        rep.scales.push_back(make_scale(km_label(d), d, hexPairs, pph, opts.boot_iters,
                                        derive_seed(opts.seed, "scale", groups.size())));
    }

    // per-landcover metrics at the plot:pixel scale
    std::map<int, EvalPairs> byClass;
    for (const auto& p : rep.pairs)
        if (p.landcover != 0) byClass[p.landcover].push(p.ref, p.pred);
    for (const auto& [cls, pairs] : byClass) {
        ClassMetrics cm;
        cm.landcover = cls;
        cm.n = pairs.n();
        cm.metrics = metrics_or_partial(pairs, opts.boot_iters,
                                        derive_seed(opts.seed, "class", cls));
        rep.per_class.push_back(std::move(cm));
    }

    // per-hex residual summaries; single-plot hexes removed here only
    const HexTessellation residTess{opts.residual_spacing_m, origin, opts.hex_orientation};
    rep.hex_residuals =
        hex_residual_stats(rep.pairs, residTess, 2, &rep.excluded_single_plot_hexes);
    return rep;
}

SmallAreaResult small_area_comparison(const Grid& masked_surface, const ClassGrid& cg,
                                      const std::vector<SmallAreaHex>& hexes,
                                      double spacing_m, HexOrientation orientation) {
    if (!(masked_surface.geo == cg.geo))
        throw GridMismatch("small_area: surface and class grid are not aligned");
    if (spacing_m <= 0.0) throw InvalidParams("small_area: spacing must be > 0");

    SmallAreaResult res;
    std::size_t inside = 0;
    for (const auto& h : hexes) {
        // hex polygon centered on the row's centroid
        HexTessellation tess{spacing_m, h.center, orientation};
        const Polygon poly = tess.polygon({0, 0});

        CoverageWeights w;
        try {
            w = coverage_weights(poly, masked_surface.geo);
        } catch (const EmptyIntersection&) {
            res.skipped.push_back({h.hex_id, "outside mapped extent"});
            continue;
        }
        const double coveredArea =
            w.total_fraction() * masked_surface.geo.cellsize * masked_surface.geo.cellsize;
        if (coveredArea < 0.5 * tess.hex_area()) {
            res.skipped.push_back({h.hex_id, "majority of area outside mapped extent"});
            continue;
        }

        double vegFrac = 0.0;
        {
            double veg = 0.0, all = 0.0;
            for (const auto& e : w.entries) {
                all += e.fraction;
                if (lcmap::vegetated(cg.at(e.row, e.col))) veg += e.fraction;
            }
            vegFrac = all > 0.0 ? veg / all : 0.0;
        }
        if (vegFrac == 0.0) {
            res.skipped.push_back({h.hex_id, "zero vegetated fraction"});
            continue;
        }

        const double mapped = weighted_extract(w, masked_surface);
        if (mapped == masked_surface.nodata) {
            res.skipped.push_back({h.hex_id, "no valid masked cells"});
            continue;
        }

        SmallAreaRow row;
        row.hex_id = h.hex_id;
        row.mapped_mean = mapped;
        row.veg_fraction = vegFrac;
        row.adj_estimate = h.fia_estimate / vegFrac;
        row.adj_ci_low = h.ci_low / vegFrac;
        row.adj_ci_high = h.ci_high / vegFrac;
        row.inside_ci = mapped >= row.adj_ci_low && mapped <= row.adj_ci_high;
        if (row.inside_ci) ++inside;
        res.rows.push_back(std::move(row));
    }
    res.pct_inside_ci =
        res.rows.empty() ? 0.0
                         : 100.0 * static_cast<double>(inside) / static_cast<double>(res.rows.size());
    return res;
}

std::vector<SmallAreaHex> read_small_area_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto cId = t.col("hex_id"), cX = t.col("cx"), cY = t.col("cy"),
               cEst = t.col("fia_estimate"), cLo = t.col("ci_low"), cHi = t.col("ci_high");
    std::vector<SmallAreaHex> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        SmallAreaHex h;
        h.hex_id = r[cId];
        h.center = {std::stod(r[cX]), std::stod(r[cY])};
        h.fia_estimate = std::stod(r[cEst]);
        h.ci_low = std::stod(r[cLo]);
        h.ci_high = std::stod(r[cHi]);
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace agb
