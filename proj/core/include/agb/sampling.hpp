#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agb/grid.hpp"
#include "agb/plots.hpp"
#include "agb/table.hpp"

namespace agb {

struct StratifiedSampleSpec {
    int n_strata = 20;
    int per_stratum = 1000;
    double lower = 0.0;
    std::optional<double> upper;  // default: max mapped AGB
    std::uint64_t seed = 0;
    bool fail_on_underfill = false;

    void validate() const;
};

struct SamplePoint {
    int stratum = 0;
    int row = 0;
    int col = 0;
    double x = 0.0;  // cell center
    double y = 0.0;
    double agb = 0.0;
};

struct StratumShortfall {
    int stratum = 0;
    std::int64_t available = 0;
};

struct StratifiedSampleResult {
    std::vector<SamplePoint> samples;  // ordered by (stratum, draw index)
    std::vector<StratumShortfall> underfilled;
    double lower = 0.0;
    double upper = 0.0;
    double width = 0.0;
};

/// Without-replacement uniform sampling within equal-width AGB strata
/// [lower + k*w, lower + (k+1)*w), last interval closed. Throws
/// DataError on underfill when fail_on_underfill is set; otherwise takes
/// every available cell and records the shortfall.
StratifiedSampleResult stratified_sample(const Grid& agb, const StratifiedSampleSpec& spec);

// Sample CSV columns: sample_id,stratum,year,x,y,agb_mg_ha. The `year`
// column stamps the vintage of the sampled surface so downstream assembly
// can pick the matching predictor stack.
void write_samples_csv(const std::filesystem::path& path,
                       const StratifiedSampleResult& r, int year);

struct SplitSpec {
    std::optional<int> assessment_panel;  // 1..5; nullopt = draw from seed
    double train_fraction = 0.8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PanelPartition {
    std::vector<PlotRecord> model_dev;       // fully forested or true zero
    std::vector<PlotRecord> map_assessment;  // the held-out panel
    int assessment_panel = 0;
    std::size_t dropped_not_forested = 0;    // excluded from model_dev
};

PanelPartition partition_panels(const std::vector<PlotRecord>& plots, const SplitSpec& spec);

struct TrainTestSplit {
    std::vector<std::size_t> train;  // ascending row indices, size ceil(n*f)
    std::vector<std::size_t> test;
};

TrainTestSplit train_test_split(std::size_t n_rows, const SplitSpec& spec);

}  // namespace agb
