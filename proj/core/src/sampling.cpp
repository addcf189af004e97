#include <algorithm>
#include <cmath>

#include "agb/csv.hpp"
#include "agb/rng.hpp"
#include "agb/sampling.hpp"

namespace agb {

void StratifiedSampleSpec::validate() const {
    if (n_strata < 1) throw InvalidParams("sample: n_strata must be >= 1");
    if (per_stratum < 1) throw InvalidParams("sample: per_stratum must be >= 1");
    if (upper && *upper <= lower) throw InvalidParams("sample: upper must exceed lower");
}

StratifiedSampleResult stratified_sample(const Grid& agb, const StratifiedSampleSpec& spec) {
    spec.validate();

    double upper;
    if (spec.upper) {
        upper = *spec.upper;
    } else {
        upper = -std::numeric_limits<double>::infinity();
        for (float v : agb.values)
            if (!agb.is_nodata(v)) upper = std::max(upper, static_cast<double>(v));
        if (!std::isfinite(upper)) throw DataError("sample: grid has no valid cells");
        if (upper <= spec.lower) throw DataError("sample: max mapped AGB <= lower bound");
    }

    StratifiedSampleResult res;
    res.lower = spec.lower;
    res.upper = upper;
    res.width = (upper - spec.lower) / spec.n_strata;

    // Bucket valid in-range cells. Intervals are half-open, last closed.
    std::vector<std::vector<std::int64_t>> buckets(spec.n_strata);
    const std::int64_t n = static_cast<std::int64_t>(agb.values.size());
    for (std::int64_t i = 0; i < n; ++i) {
        const float v = agb.values[i];
        if (agb.is_nodata(v)) continue;
        const double d = static_cast<double>(v);
        if (d < spec.lower || d > upper) continue;
        int k = static_cast<int>(std::floor((d - spec.lower) / res.width));
        if (k >= spec.n_strata) k = spec.n_strata - 1;  // d == upper
        buckets[k].push_back(i);
    }

    for (int k = 0; k < spec.n_strata; ++k) {
        auto& cells = buckets[k];
        const std::int64_t avail = static_cast<std::int64_t>(cells.size());
        std::int64_t take = spec.per_stratum;
        if (avail < take) {
            if (spec.fail_on_underfill)
                throw DataError("sample: stratum " + std::to_string(k) + " has only " +
                                std::to_string(avail) + " cells");
            res.underfilled.push_back({k, avail});
            take = avail;
        }
        // Partial Fisher-Yates with the stratum's own labeled stream.
        Rng rng(derive_seed(spec.seed, "stratum", static_cast<std::uint64_t>(k)));
        for (std::int64_t j = 0; j < take; ++j) {
            const std::int64_t pick =
                j + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(avail - j)));
            std::swap(cells[j], cells[pick]);
            const std::int64_t idx = cells[j];
            SamplePoint p;
            p.stratum = k;
            p.row = static_cast<int>(idx / agb.geo.ncols);
            p.col = static_cast<int>(idx % agb.geo.ncols);
            p.x = agb.geo.cell_x(p.col);
            p.y = agb.geo.cell_y(p.row);
            p.agb = agb.at(p.row, p.col);
            res.samples.push_back(p);
        }
    }
    return res;
}

void write_samples_csv(const std::filesystem::path& path,
                       const StratifiedSampleResult& r, int year) {
    CsvWriter w(path);
    w.row({"sample_id", "stratum", "year", "x", "y", "agb_mg_ha"});
    char id[32];
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        std::snprintf(id, sizeof(id), "px%06zu", i);
        w.row({id, std::to_string(s.stratum), std::to_string(year), fmt_exact(s.x),
               fmt_exact(s.y), fmt_exact(s.agb)});
    }
}

void SplitSpec::validate() const {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw InvalidParams("split: train_fraction must be in (0,1)");
    if (assessment_panel && (*assessment_panel < 1 || *assessment_panel > 5))
        throw InvalidParams("split: assessment_panel must be 1..5");
}

PanelPartition partition_panels(const std::vector<PlotRecord>& plots, const SplitSpec& spec) {
    spec.validate();
    if (plots.empty()) throw DataError("partition_panels: no plots");

    PanelPartition part;
    if (spec.assessment_panel) {
        part.assessment_panel = *spec.assessment_panel;
    } else {
        Rng rng(derive_seed(spec.seed, "panel"));
        part.assessment_panel = 1 + static_cast<int>(rng.below(5));
    }

    for (const auto& p : plots) {
        if (p.panel == part.assessment_panel) {
            part.map_assessment.push_back(p);
        } else if (p.fully_forested || p.true_zero) {
            part.model_dev.push_back(p);
        } else {
            ++part.dropped_not_forested;
        }
    }
    return part;
}

TrainTestSplit train_test_split(std::size_t n_rows, const SplitSpec& spec) {
    spec.validate();
    if (n_rows < 2) throw DataError("train_test_split: need >= 2 rows");

    std::vector<std::size_t> idx(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) idx[i] = i;
    Rng rng(derive_seed(spec.seed, "split"));
    for (std::size_t i = n_rows - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.below(i + 1)]);

    const auto nTrain = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n_rows) * spec.train_fraction));
    TrainTestSplit s;
    s.train.assign(idx.begin(), idx.begin() + nTrain);
    s.test.assign(idx.begin() + nTrain, idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

}  // namespace agb
