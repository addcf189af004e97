#include <algorithm>

#include "agb/csv.hpp"
#include "agb/grid_ops.hpp"
#include "agb/table.hpp"

namespace agb {

void TrainingTable::push_row(double resp, std::span<const double> feats,
                             const std::string& src, int yr, double px, double py) {
    if (feats.size() != width())
        throw DataError("table: row width mismatch");
    response.push_back(resp);
    features.insert(features.end(), feats.begin(), feats.end());
    source.push_back(src);
    year.push_back(yr);
    x.push_back(px);
    y.push_back(py);
}

TrainingTable subset(const TrainingTable& t, std::span<const std::size_t> idx) {
    TrainingTable s;
    s.feature_names = t.feature_names;
    s.response.reserve(idx.size());
    s.features.reserve(idx.size() * t.width());
    for (std::size_t i : idx)
        s.push_row(t.response[i], t.row(i), t.source[i], t.year[i], t.x[i], t.y[i]);
    return s;
}

void write_table_csv(const std::filesystem::path& path, const TrainingTable& t) {
    CsvWriter w(path);
    std::vector<std::string> header = {"response", "source", "year", "x", "y"};
    header.insert(header.end(), t.feature_names.begin(), t.feature_names.end());
    w.row(header);
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::vector<std::string> fields = {fmt_exact(t.response[i]), t.source[i],
                                           std::to_string(t.year[i]), fmt_exact(t.x[i]),
                                           fmt_exact(t.y[i])};
        for (double v : t.row(i)) fields.push_back(fmt_exact(v));
        w.row(fields);
    }
}

TrainingTable read_table_csv(const std::filesystem::path& path) {
    const CsvTable c = read_csv(path);
    if (c.header.size() < 5 || c.header[0] != "response")
        throw DataError("table csv: unexpected header in " + path.string());
    TrainingTable t;
    t.feature_names.assign(c.header.begin() + 5, c.header.end());
    for (const auto& r : c.rows) {
        std::vector<double> feats(t.width());
        for (std::size_t j = 0; j < feats.size(); ++j) feats[j] = std::stod(r[5 + j]);
        t.push_row(std::stod(r[0]), feats, r[1], std::stoi(r[2]), std::stod(r[3]),
                   std::stod(r[4]));
    }
    return t;
}

void PredictorStack::validate() const {
    schema.validate();
    for (const auto& p : schema.predictors) {
        if (p.kind == Predictor::Kind::Continuous) {
            auto it = continuous.find(p.name);
            if (it == continuous.end())
                throw DataError("stack: missing continuous grid '" + p.name + "'");
            if (!(it->second.geo == geo))
                throw GridMismatch("stack: grid '" + p.name + "' is not aligned");
        } else {
            auto it = categorical.find(p.name);
            if (it == categorical.end())
                throw DataError("stack: missing categorical grid '" + p.name + "'");
            if (!(it->second.geo == geo))
                throw GridMismatch("stack: grid '" + p.name + "' is not aligned");
        }
    }
}

PredictorStack load_stack(const std::filesystem::path& dir, const PredictorSchema& schema) {
    PredictorStack s;
    s.schema = schema;
    bool first = true;
    for (const auto& p : schema.predictors) {
        const auto base = dir / p.name;
        if (p.kind == Predictor::Kind::Continuous) {
            auto g = read_grid(base);
            if (first) s.geo = g.geo, first = false;
            s.continuous.emplace(p.name, std::move(g));
        } else {
            auto g = read_class_grid(base);
            if (first) s.geo = g.geo, first = false;
            s.categorical.emplace(p.name, std::move(g));
        }
    }
    s.validate();
    return s;
}

std::vector<LidarSample> read_lidar_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto cId = t.col("sample_id"), cYear = t.col("year"), cX = t.col("x"),
               cY = t.col("y"), cAgb = t.col("agb_mg_ha");
    std::vector<LidarSample> out;
    out.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        LidarSample s;
        s.sample_id = r[cId];
        s.year = std::stoi(r[cYear]);
        s.x = std::stod(r[cX]);
        s.y = std::stod(r[cY]);
        s.agb = std::stod(r[cAgb]);
        if (s.agb < 0.0) throw DataError("lidar csv: negative AGB at " + s.sample_id);
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// Appends one record's expanded features, or reports why it cannot.
// Continuous categorical handling differs between plot (coverage-weighted)
// and pixel (containing cell) rows; `drop` receives a reason on failure.
class FeatureBuilder {
public:
    FeatureBuilder(const PredictorSchema& schema, const PredictorStack& stack)
        : schema_(schema), stack_(stack) {}

    bool plot_row(const CoverageWeights& w, std::vector<double>& out, std::string& why) const {
        out.clear();
        for (const auto& p : schema_.predictors) {
            if (p.kind == Predictor::Kind::Continuous) {
                const Grid& g = stack_.continuous.at(p.name);
                for (const auto& e : w.entries)
                    if (g.is_nodata(g.at(e.row, e.col))) {
                        why = "nodata under footprint: " + p.name;
                        return false;
                    }
                out.push_back(weighted_extract(w, g));
            } else {
                const ClassGrid& g = stack_.categorical.at(p.name);
                std::uint8_t code;
                try {
                    code = majority_class(w, g);
                } catch (const AllNodata&) {
                    why = "class nodata under footprint: " + p.name;
                    return false;
                }
                if (!expand(p, code, out)) {
                    why = "undeclared level " + std::to_string(code) + " of " + p.name;
                    return false;
                }
            }
        }
        return true;
    }

    bool pixel_row(int row, int col, std::vector<double>& out, std::string& why) const {
        out.clear();
        for (const auto& p : schema_.predictors) {
            if (p.kind == Predictor::Kind::Continuous) {
                const Grid& g = stack_.continuous.at(p.name);
                const float v = g.at(row, col);
                if (g.is_nodata(v)) {
                    why = "nodata predictor: " + p.name;
                    return false;
                }
                out.push_back(v);
            } else {
                const ClassGrid& g = stack_.categorical.at(p.name);
                const std::uint8_t code = g.at(row, col);
                if (code == lcmap::kNodata) {
                    why = "class nodata predictor: " + p.name;
                    return false;
                }
                if (!expand(p, code, out)) {
                    why = "undeclared level " + std::to_string(code) + " of " + p.name;
                    return false;
                }
            }
        }
        return true;
    }

private:
    static bool expand(const Predictor& p, int code, std::vector<double>& out) {
        const auto it = std::find(p.levels.begin(), p.levels.end(), code);
        if (it == p.levels.end()) return false;
        for (std::size_t i = 0; i < p.levels.size(); ++i)
            out.push_back(static_cast<std::size_t>(it - p.levels.begin()) == i ? 1.0 : 0.0);
        return true;
    }

    const PredictorSchema& schema_;
    const PredictorStack& stack_;
};

const PredictorStack& stack_for_year(const std::map<int, PredictorStack>& stacks, int year,
                                     const std::string& id) {
    const auto it = stacks.find(year);
    if (it == stacks.end())
        throw MissingYearStack("no predictor stack for year " + std::to_string(year) +
                               " (record " + id + ")");
    return it->second;
}

}  // namespace

bool cell_features(const PredictorStack& stack, int row, int col, std::vector<double>& out,
                   std::string& why) {
    return FeatureBuilder(stack.schema, stack).pixel_row(row, col, out, why);
}

AssembleResult assemble_plots(const std::vector<PlotRecord>& plots,
                              const std::map<int, PredictorStack>& stacks,
                              const PredictorSchema& schema) {
    schema.validate();
    AssembleResult res;
    res.table.feature_names = schema.feature_names();
    std::vector<double> feats;
    for (const auto& p : plots) {
        const PredictorStack& stack = stack_for_year(stacks, p.year, p.plot_id);
        CoverageWeights w;
        try {
            w = build_footprint(p).coverage(stack.geo);
        } catch (const EmptyIntersection&) {
            res.dropped.push_back({p.plot_id, "footprint outside grid extent"});
            continue;
        }
        std::string why;
        if (!FeatureBuilder(schema, stack).plot_row(w, feats, why)) {
            res.dropped.push_back({p.plot_id, why});
            continue;
        }
        res.table.push_row(p.agb, feats, "plot", p.year, p.x, p.y);
    }
    return res;
}

AssembleResult assemble_pixels(const std::vector<LidarSample>& samples,
                               const std::map<int, PredictorStack>& stacks,
                               const PredictorSchema& schema) {
    schema.validate();
    AssembleResult res;
    res.table.feature_names = schema.feature_names();
    std::vector<double> feats;
    for (const auto& s : samples) {
        const PredictorStack& stack = stack_for_year(stacks, s.year, s.sample_id);
        if (!stack.geo.contains(s.x, s.y)) {
            res.dropped.push_back({s.sample_id, "outside grid extent"});
            continue;
        }
        const int row = stack.geo.row_of(s.y);
        const int col = stack.geo.col_of(s.x);
        std::string why;
        if (!FeatureBuilder(schema, stack).pixel_row(row, col, feats, why)) {
            res.dropped.push_back({s.sample_id, why});
            continue;
        }
        res.table.push_row(s.agb, feats, "lidar_pixel", s.year, s.x, s.y);
    }
    return res;
}

}  // namespace agb
