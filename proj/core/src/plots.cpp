#include <cmath>

#include "agb/csv.hpp"
#include "agb/plots.hpp"

namespace agb {

void validate(const PlotRecord& p) {
    if (p.plot_id.empty()) throw DataError("plot: empty plot_id");
    if (p.year < 1990 || p.year > 2019)
        throw DataError("plot " + p.plot_id + ": year out of range");
    if (p.agb < 0.0) throw DataError("plot " + p.plot_id + ": negative AGB");
    if (p.true_zero && p.agb != 0.0)
        throw DataError("plot " + p.plot_id + ": true_zero with nonzero AGB");
    if (p.panel < 1 || p.panel > 5)
        throw DataError("plot " + p.plot_id + ": panel out of 1..5");
}

PlotFootprint build_footprint(const PlotRecord& p) {
    PlotFootprint f;
    f.plot_id = p.plot_id;
    f.centers[0] = {p.x, p.y};
    // Azimuth measured clockwise from north: offset = (sin az, cos az).
    const double azimuths[] = {360.0, 120.0, 240.0};
    for (int i = 0; i < 3; ++i) {
        const double a = azimuths[i] * 3.14159265358979323846 / 180.0;
        f.centers[i + 1] = {p.x + kSubplotOffsetM * std::sin(a),
                            p.y + kSubplotOffsetM * std::cos(a)};
    }
    return f;
}

std::vector<Polygon> PlotFootprint::subplots() const {
    std::vector<Polygon> polys;
    polys.reserve(4);
    for (const auto& c : centers)
        polys.push_back(Polygon::regular_ngon(c, kSubplotRadiusM, kCircleSides));
    return polys;
}

CoverageWeights PlotFootprint::coverage(const GridGeoref& geo) const {
    CoverageWeights merged;
    bool any = false;
    for (const auto& poly : subplots()) {
        try {
            merged.merge(coverage_weights(poly, geo));
            any = true;
        } catch (const EmptyIntersection&) {
            // a subplot may hang off the grid edge; handled below if all do
        }
    }
    if (!any)
        throw EmptyIntersection("footprint " + plot_id + " outside grid extent");
    return merged;
}

std::vector<PlotRecord> read_plots_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto cId = t.col("plot_id"), cYear = t.col("year"), cX = t.col("x"),
               cY = t.col("y"), cAgb = t.col("agb_mg_ha"),
               cFf = t.col("fully_forested"), cTz = t.col("true_zero"),
               cPanel = t.col("panel");
    auto as_bool = [&](const std::string& s) {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw DataError("plots csv: bad boolean '" + s + "' in " + path.string());
    };
    std::vector<PlotRecord> plots;
    plots.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        PlotRecord p;
        p.plot_id = r[cId];
        p.year = std::stoi(r[cYear]);
        p.x = std::stod(r[cX]);
        p.y = std::stod(r[cY]);
        p.agb = std::stod(r[cAgb]);
        p.fully_forested = as_bool(r[cFf]);
        p.true_zero = as_bool(r[cTz]);
        p.panel = std::stoi(r[cPanel]);
        validate(p);
        plots.push_back(std::move(p));
    }
    return plots;
}

void write_plots_csv(const std::filesystem::path& path,
                     const std::vector<PlotRecord>& plots) {
    CsvWriter w(path);
    w.row({"plot_id", "year", "x", "y", "agb_mg_ha", "fully_forested", "true_zero",
           "panel"});
    for (const auto& p : plots) {
        w.row({p.plot_id, std::to_string(p.year), fmt_exact(p.x), fmt_exact(p.y),
               fmt_exact(p.agb), p.fully_forested ? "true" : "false",
               p.true_zero ? "true" : "false", std::to_string(p.panel)});
    }
}

}  // namespace agb
