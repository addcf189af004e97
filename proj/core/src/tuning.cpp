#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "agb/csv.hpp"
#include "agb/rng.hpp"
#include "agb/tuning.hpp"

namespace agb {

void TuneGrid::validate() const {
    if (axes.empty()) throw ConfigError("tune: empty grid");
    for (const auto& [name, values] : axes)
        if (values.empty()) throw ConfigError("tune: axis '" + name + "' is empty");
    if (folds < 2) throw ConfigError("tune: folds must be >= 2");
    if (refine_rounds < 0) throw ConfigError("tune: refine_rounds must be >= 0");
}

namespace {

// Integral axis values are stored as integers so learner params that
// expect ints (num_trees, num_leaves, ...) parse naturally.
nlohmann::json axis_value(double v) {
    if (v == std::floor(v) && std::abs(v) < 9e15)
        return static_cast<std::int64_t>(std::llround(v));
    return v;
}

std::vector<std::map<std::string, double>> expand(
    const std::map<std::string, std::vector<double>>& axes) {
    std::vector<std::map<std::string, double>> combos{{}};
    for (const auto& [name, values] : axes) {
        std::vector<std::map<std::string, double>> next;
        next.reserve(combos.size() * values.size());
        for (const auto& c : combos)
            for (double v : values) {
                auto cc = c;
                cc[name] = v;
                next.push_back(std::move(cc));
            }
        combos = std::move(next);
    }
    return combos;
}

nlohmann::json apply_combo(const nlohmann::json& base,
                           const std::map<std::string, double>& combo) {
    nlohmann::json p = base;
    for (const auto& [name, v] : combo) p[name] = axis_value(v);
    return p;
}

}  // namespace

TuneResult grid_search(const TrainingTable& train, const TuneGrid& grid,
                       const std::string& comp_kind, const nlohmann::json& base_params,
                       int threads) {
    grid.validate();
    const std::size_t n = train.rows();
    if (n < static_cast<std::size_t>(grid.folds))
        throw DataError("tune: fewer rows than folds");

    // Fold assignment is fixed once and shared across every combination.
    std::vector<int> fold(n);
    {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(derive_seed(grid.seed, "folds"));
        for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
        for (std::size_t i = 0; i < n; ++i) fold[idx[i]] = static_cast<int>(i) % grid.folds;
    }

    std::vector<TrainingTable> foldTrain(grid.folds), foldTest(grid.folds);
    for (int f = 0; f < grid.folds; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < n; ++i)
            (fold[i] == f ? te : tr).push_back(i);
        foldTrain[f] = subset(train, tr);
        foldTest[f] = subset(train, te);
    }

    TuneResult res;
    double bestRmse = std::numeric_limits<double>::infinity();
    std::map<std::string, double> bestCombo;
    std::set<std::string> evaluated;

    auto eval_round = [&](const std::vector<std::map<std::string, double>>& combos) {
        for (std::size_t ci = 0; ci < combos.size(); ++ci) {
            const nlohmann::json params = apply_combo(base_params, combos[ci]);
            const std::string key = params.dump();
            if (!evaluated.insert(key).second) continue;

            double sumRmse = 0.0;
            bool failed = false;
            for (int f = 0; f < grid.folds; ++f) {
                CvCell cell;
                cell.params = params;
                cell.fold = f;
                try {
                    Component comp = make_component({comp_kind, params}, threads);
                    auto m = comp.fit(foldTrain[f],
                                      derive_seed(grid.seed, "cv:" + key,
                                                  static_cast<std::uint64_t>(f)));
                    double se = 0.0;
                    for (std::size_t i = 0; i < foldTest[f].rows(); ++i) {
                        const double e =
                            foldTest[f].response[i] - m->predict_row(foldTest[f].row(i));
                        se += e * e;
                    }
                    cell.rmse = std::sqrt(se / static_cast<double>(foldTest[f].rows()));
                    sumRmse += cell.rmse;
                } catch (const Error& e) {
                    cell.error = e.what();
                    cell.rmse = std::numeric_limits<double>::quiet_NaN();
                    failed = true;
                }
                res.table.push_back(std::move(cell));
            }
            if (failed) continue;
            const double meanRmse = sumRmse / grid.folds;
            if (meanRmse < bestRmse) {
                bestRmse = meanRmse;
                bestCombo = combos[ci];
            }
        }
    };

    eval_round(expand(grid.axes));
    if (!std::isfinite(bestRmse)) throw NumericError("tune: every grid cell failed");

    // Refinement schedule: round r re-centers each axis on the incumbent
    // with spacing halved r times, keeping integral axes integral.
    for (int round = 1; round <= grid.refine_rounds; ++round) {
        std::map<std::string, std::vector<double>> refined;
        for (const auto& [name, values] : grid.axes) {
            if (values.size() < 2) {
                refined[name] = values;
                continue;
            }
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            double spacing = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
                spacing = std::min(spacing, sorted[i + 1] - sorted[i]);
            const bool integral =
                std::all_of(sorted.begin(), sorted.end(),
                            [](double v) { return v == std::floor(v); });
            const bool positive = sorted.front() > 0.0;
            const double step = spacing / std::pow(2.0, round);
            const double center = bestCombo.at(name);
            std::vector<double> vals;
            for (double cand : {center - step, center, center + step}) {
                if (integral) cand = std::round(cand);
                if (positive && cand <= 0.0) continue;
                vals.push_back(cand);
            }
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            refined[name] = std::move(vals);
        }
        eval_round(expand(refined));
    }

    res.best_params = apply_combo(base_params, bestCombo);
    res.best_rmse = bestRmse;
    return res;
}

void write_tuning_csv(const std::filesystem::path& path, const std::string& comp_kind,
                      const std::vector<CvCell>& table) {
    CsvWriter w(path);
    w.row({"comp_kind", "param_json", "fold", "rmse"});
    for (const auto& c : table)
        w.row({comp_kind, c.params.dump(), std::to_string(c.fold),
               c.error.empty() ? fmt_fixed(c.rmse) : "error:" + c.error});
}

}  // namespace agb
