#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "agb/csv.hpp"
#include "agb/report_svg.hpp"

namespace agb {

void write_scatter_svg(const std::filesystem::path& path, const EvalPairs& pairs,
                       const GmfrLine& line, bool gmfr_ok, const ScatterOptions& opts) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());

    const int size = opts.size_px;
    const double margin = 50.0;
    const double plotSize = size - 2.0 * margin;

    auto display = [&](double v) {
        if (opts.cap) v = std::min(v, *opts.cap);
        return std::max(v, 0.0);
    };

    double hi = 1.0;
    for (std::size_t i = 0; i < pairs.n(); ++i)
        hi = std::max({hi, display(pairs.ref[i]), display(pairs.pred[i])});
    hi *= 1.05;

    // data -> pixel; y axis flipped
    auto px = [&](double v) { return margin + v / hi * plotSize; };
    auto py = [&](double v) { return size - margin - v / hi * plotSize; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    nlohmann::json meta = {{"n", pairs.n()},
                           {"gmfr_slope", gmfr_ok ? line.slope : 0.0},
                           {"gmfr_intercept", gmfr_ok ? line.intercept : 0.0},
                           {"gmfr_defined", gmfr_ok},
                           {"axis_max", hi}};
    out << "  <metadata>" << meta.dump() << "</metadata>\n";
    out << "  <rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plotSize
        << "\" height=\"" << plotSize << "\" fill=\"white\" stroke=\"black\"/>\n";
    if (!opts.title.empty())
        out << "  <text x=\"" << size / 2.0 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-size=\"15\">" << opts.title << "</text>\n";

    // axis labels
    out << "  <text x=\"" << size / 2.0 << "\" y=\"" << size - 10.0
        << "\" text-anchor=\"middle\" font-size=\"13\">Predicted AGB (Mg ha-1)</text>\n";
    out << "  <text x=\"14\" y=\"" << size / 2.0 << "\" text-anchor=\"middle\" "
        << "font-size=\"13\" transform=\"rotate(-90 14 " << size / 2.0
        << ")\">Reference AGB (Mg ha-1)</text>\n";

    // 1:1 line, solid red
    out << "  <line x1=\"" << px(0.0) << "\" y1=\"" << py(0.0) << "\" x2=\"" << px(hi)
        << "\" y2=\"" << py(hi) << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";

    // GMFR line, dashed orange: ref = slope * pred + intercept
    if (gmfr_ok) {
        auto clampPt = [&](double predV) { return line.slope * predV + line.intercept; };
        out << "  <line x1=\"" << px(0.0) << "\" y1=\"" << py(std::clamp(clampPt(0.0), 0.0, hi))
            << "\" x2=\"" << px(hi) << "\" y2=\"" << py(std::clamp(clampPt(hi), 0.0, hi))
            << "\" stroke=\"orange\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (std::size_t i = 0; i < pairs.n(); ++i) {
        const double r = display(pairs.ref[i]);
        const double p = display(pairs.pred[i]);
        out << "  <circle cx=\"" << fmt_fixed(px(p), 2) << "\" cy=\"" << fmt_fixed(py(r), 2)
            << "\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.6\" data-ref=\""
            << fmt_fixed(r, 3) << "\" data-pred=\"" << fmt_fixed(p, 3) << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace agb
