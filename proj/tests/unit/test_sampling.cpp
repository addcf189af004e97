#include <doctest.h>

#include <set>

#include "agb/rng.hpp"
#include "agb/sampling.hpp"

using namespace agb;

namespace {

Grid richGrid(int n, double maxAgb, std::uint64_t seed) {
    GridGeoref geo;
    geo.nrows = n;
    geo.ncols = n;
    geo.cellsize = 30.0;
    geo.crs_tag = "test";
    Grid g = Grid::filled(geo, 0.0f);
    Rng rng(seed);
    for (auto& v : g.values) v = static_cast<float>(rng.uniform(0.0, maxAgb));
    g.values[0] = static_cast<float>(maxAgb);  // pin the max
    return g;
}

}  // namespace

TEST_CASE("stratum width: 330 over 20 strata is 16.5") {
    Grid g = richGrid(60, 330.0, 3);
    StratifiedSampleSpec spec;
    spec.n_strata = 20;
    spec.per_stratum = 10;
    spec.upper = 330.0;
    const auto res = stratified_sample(g, spec);
    CHECK(res.width == doctest::Approx(16.5));
    CHECK(res.upper == doctest::Approx(330.0));
}

TEST_CASE("stratified sample: counts, membership, no duplicates") {
    const Grid g = richGrid(100, 330.0, 17);
    StratifiedSampleSpec spec;
    spec.n_strata = 20;
    spec.per_stratum = 100;
    spec.seed = 4;
    const auto res = stratified_sample(g, spec);
    CHECK(res.underfilled.empty());
    CHECK(res.samples.size() == 2000);

    std::set<std::pair<int, int>> cells;
    int lastStratum = 0;
    for (const auto& s : res.samples) {
        // every sampled value lies inside its stratum interval
        const double lo = res.lower + s.stratum * res.width;
        const double hi = res.lower + (s.stratum + 1) * res.width;
        CHECK(s.agb >= lo);
        if (s.stratum < spec.n_strata - 1)
            CHECK(s.agb < hi);
        else
            CHECK(s.agb <= res.upper);
        CHECK(cells.insert({s.row, s.col}).second);  // no duplicates anywhere
        CHECK(s.stratum >= lastStratum);             // ordered by stratum
        lastStratum = s.stratum;
    }
}

TEST_CASE("stratified sample determinism") {
    const Grid g = richGrid(50, 300.0, 8);
    StratifiedSampleSpec spec;
    spec.n_strata = 10;
    spec.per_stratum = 30;
    spec.seed = 123;
    const auto a = stratified_sample(g, spec);
    const auto b = stratified_sample(g, spec);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].row == b.samples[i].row);
        CHECK(a.samples[i].col == b.samples[i].col);
    }
    spec.seed = 124;
    const auto c = stratified_sample(g, spec);
    bool anyDiff = false;
    for (std::size_t i = 0; i < a.samples.size() && !anyDiff; ++i)
        anyDiff = a.samples[i].row != c.samples[i].row || a.samples[i].col != c.samples[i].col;
    CHECK(anyDiff);
}

TEST_CASE("underfilled strata: take-all by default, fail on request") {
    // tiny grid cannot fill 1000 per stratum
    const Grid g = richGrid(10, 300.0, 9);
    StratifiedSampleSpec spec;
    spec.n_strata = 5;
    spec.per_stratum = 1000;
    const auto res = stratified_sample(g, spec);
    CHECK(res.underfilled.size() == 5);
    CHECK(res.samples.size() == 100);  // every valid cell taken

    spec.fail_on_underfill = true;
    CHECK_THROWS_AS(stratified_sample(g, spec), DataError);
}

TEST_CASE("partition_panels") {
    std::vector<PlotRecord> plots;
    for (int i = 0; i < 100; ++i) {
        PlotRecord p;
        p.plot_id = "P" + std::to_string(i);
        p.year = 2005;
        p.panel = 1 + i % 5;
        p.fully_forested = true;
        plots.push_back(p);
    }
    SplitSpec spec;
    spec.assessment_panel = 2;
    auto part = partition_panels(plots, spec);
    CHECK(part.map_assessment.size() == 20);
    CHECK(part.model_dev.size() == 80);

    // disjoint by plot_id
    std::set<std::string> dev;
    for (const auto& p : part.model_dev) dev.insert(p.plot_id);
    for (const auto& p : part.map_assessment) CHECK(dev.count(p.plot_id) == 0);

    // neither forested nor true zero, off-panel -> excluded from model_dev
    plots[0].fully_forested = false;
    plots[0].true_zero = false;
    plots[0].panel = 1;
    part = partition_panels(plots, spec);
    CHECK(part.model_dev.size() == 79);
    CHECK(part.dropped_not_forested == 1);

    // degenerate: everything in the assessment panel
    for (auto& p : plots) p.panel = 3;
    spec.assessment_panel = 3;
    part = partition_panels(plots, spec);
    CHECK(part.model_dev.empty());
    CHECK(part.map_assessment.size() == 100);

    // random panel draw is deterministic under the seed
    spec.assessment_panel.reset();
    spec.seed = 77;
    const auto p1 = partition_panels(plots, spec);
    const auto p2 = partition_panels(plots, spec);
    CHECK(p1.assessment_panel == p2.assessment_panel);
}

TEST_CASE("train_test_split sizes and determinism") {
    SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.seed = 5;
    auto s = train_test_split(10, spec);
    CHECK(s.train.size() == 8);
    CHECK(s.test.size() == 2);

    const auto s2 = train_test_split(10, spec);
    CHECK(s.train == s2.train);
    CHECK(s.test == s2.test);

    // disjoint and exhaustive
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    for (auto i : s.test) CHECK(all.insert(i).second);
    CHECK(all.size() == 10);

    const auto big = train_test_split(20000, spec);
    CHECK(big.train.size() == 16000);

    spec.train_fraction = 1.5;
    CHECK_THROWS_AS(train_test_split(10, spec), InvalidParams);
}
