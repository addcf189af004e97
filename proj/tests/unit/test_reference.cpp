#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "agb/csv.hpp"
#include "agb/grid_ops.hpp"
#include "agb/table.hpp"

using namespace agb;

namespace {

GridGeoref bigGeo() {
    GridGeoref g;
    g.nrows = 10;
    g.ncols = 10;
    g.xll = -150.0;
    g.yll = -150.0;
    g.cellsize = 30.0;
    g.crs_tag = "test";
    return g;
}

PredictorSchema tinySchema() {
    PredictorSchema s;
    s.predictors = {{"A", Predictor::Kind::Continuous, {}},
                    {"LC", Predictor::Kind::Categorical, {3, 4, 6}}};
    s.validate();
    return s;
}

PredictorStack uniformStack(const GridGeoref& geo, float a, std::uint8_t lc) {
    PredictorStack st;
    st.schema = tinySchema();
    st.geo = geo;
    st.continuous.emplace("A", Grid::filled(geo, a));
    st.categorical.emplace("LC", ClassGrid::filled(geo, lc));
    return st;
}

}  // namespace

TEST_CASE("footprint geometry matches the FIA plot layout") {
    PlotRecord p;
    p.plot_id = "P1";
    p.year = 2005;
    p.x = 0.0;
    p.y = 0.0;
    const auto f = build_footprint(p);

    CHECK(f.centers[0].x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(f.centers[0].y == doctest::Approx(0.0).epsilon(1e-9));
    // azimuth 360 = due north
    CHECK(f.centers[1].x == doctest::Approx(0.0).scale(1).epsilon(0.01));
    CHECK(f.centers[1].y == doctest::Approx(36.6).epsilon(0.001));
    CHECK(f.centers[2].x == doctest::Approx(31.70).epsilon(0.001));
    CHECK(f.centers[2].y == doctest::Approx(-18.30).epsilon(0.001));
    CHECK(f.centers[3].x == doctest::Approx(-31.70).epsilon(0.001));
    CHECK(f.centers[3].y == doctest::Approx(-18.30).epsilon(0.001));

    CHECK(f.subplots().size() == 4);

    // pairwise outer-center distances equal 36.6 * sqrt(3)
    const double want = 36.6 * std::sqrt(3.0);
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j) {
            const double dx = f.centers[i].x - f.centers[j].x;
            const double dy = f.centers[i].y - f.centers[j].y;
            CHECK(std::hypot(dx, dy) == doctest::Approx(want).epsilon(1e-6 / want));
        }
}

TEST_CASE("footprint area matches 4 subplot circles within 64-gon tolerance") {
    PlotRecord p;
    p.plot_id = "P1";
    p.year = 2005;
    const auto w = build_footprint(p).coverage(bigGeo());
    const double area = w.total_fraction() * 30.0 * 30.0;
    const double want = 4.0 * 3.14159265358979323846 * 7.32 * 7.32;
    CHECK(area == doctest::Approx(want).epsilon(0.002));
}

TEST_CASE("schema expansion and validation") {
    const auto s = tinySchema();
    CHECK(s.feature_width() == 4);
    const auto names = s.feature_names();
    REQUIRE(names.size() == 4);
    CHECK(names[0] == "A");
    CHECK(names[1] == "LC=3");
    CHECK(names[3] == "LC=6");
    CHECK(s.feature_hash() == feature_names_hash(names));

    PredictorSchema bad;
    bad.predictors = {{"X", Predictor::Kind::Continuous, {}},
                      {"X", Predictor::Kind::Continuous, {}}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    PredictorSchema oneLevel;
    oneLevel.predictors = {{"C", Predictor::Kind::Categorical, {1}}};
    CHECK_THROWS_AS(oneLevel.validate(), ConfigError);
}

TEST_CASE("assemble_pixels: containing-cell features") {
    const auto geo = bigGeo();
    auto stack = uniformStack(geo, 0.0f, lcmap::kTreeCover);
    // distinguish one cell
    const int row = geo.row_of(15.0), col = geo.col_of(15.0);
    stack.continuous.at("A").at(row, col) = 7.5f;

    std::map<int, PredictorStack> stacks;
    stacks.emplace(2005, std::move(stack));
    std::vector<LidarSample> samples{{"s0", 2005, 15.0, 15.0, 111.0}};
    const auto res = assemble_pixels(samples, stacks, tinySchema());
    REQUIRE(res.table.rows() == 1);
    CHECK(res.dropped.empty());
    CHECK(res.table.response[0] == doctest::Approx(111.0));
    CHECK(res.table.row(0)[0] == doctest::Approx(7.5));
    // indicator block: LC=4 is the second level
    CHECK(res.table.row(0)[1] == 0.0);
    CHECK(res.table.row(0)[2] == 1.0);
    CHECK(res.table.row(0)[3] == 0.0);
}

TEST_CASE("assemble_plots: uniform stack reproduces cell values exactly") {
    std::map<int, PredictorStack> stacks;
    stacks.emplace(2005, uniformStack(bigGeo(), 3.25f, lcmap::kWetland));
    PlotRecord p;
    p.plot_id = "P9";
    p.year = 2005;
    p.agb = 140.0;
    p.fully_forested = true;
    const auto res = assemble_plots({p}, stacks, tinySchema());
    REQUIRE(res.table.rows() == 1);
    CHECK(res.table.row(0)[0] == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(res.table.row(0)[3] == 1.0);  // LC=6
}

TEST_CASE("assemble_plots agrees with the weighted_extract oracle") {
    const auto geo = bigGeo();
    auto stack = uniformStack(geo, 0.0f, lcmap::kTreeCover);
    Grid& a = stack.continuous.at("A");
    for (int r = 0; r < geo.nrows; ++r)
        for (int c = 0; c < geo.ncols; ++c)
            a.at(r, c) = static_cast<float>(10 * r + c);

    PlotRecord p;
    p.plot_id = "P2";
    p.year = 2005;
    p.x = 14.0;  // straddles several cells
    p.y = -2.0;
    const auto w = build_footprint(p).coverage(geo);
    const double oracle = weighted_extract(w, a);

    std::map<int, PredictorStack> stacks;
    stacks.emplace(2005, std::move(stack));
    const auto res = assemble_plots({p}, stacks, tinySchema());
    REQUIRE(res.table.rows() == 1);
    CHECK(res.table.row(0)[0] == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("assemble_plots drops rows with nodata under the footprint") {
    const auto geo = bigGeo();
    auto stack = uniformStack(geo, 1.0f, lcmap::kTreeCover);
    Grid& a = stack.continuous.at("A");
    a.at(geo.row_of(0.0), geo.col_of(0.0)) = a.nodata;

    std::map<int, PredictorStack> stacks;
    stacks.emplace(2005, std::move(stack));
    PlotRecord p;
    p.plot_id = "P3";
    p.year = 2005;
    const auto res = assemble_plots({p}, stacks, tinySchema());
    CHECK(res.table.rows() == 0);
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0].id == "P3");
    CHECK(res.dropped[0].reason.find("nodata") != std::string::npos);

    PlotRecord wrongYear = p;
    wrongYear.year = 2006;
    CHECK_THROWS_AS(assemble_plots({wrongYear}, stacks, tinySchema()), MissingYearStack);
}

TEST_CASE("indicator rows always sum to one per categorical") {
    std::map<int, PredictorStack> stacks;
    auto stack = uniformStack(bigGeo(), 1.0f, lcmap::kGrassShrub);
    for (int c = 0; c < 10; ++c) stack.categorical.at("LC").at(5, c) = lcmap::kWetland;
    stacks.emplace(2005, std::move(stack));
    std::vector<LidarSample> samples;
    for (int i = 0; i < 20; ++i)
        samples.push_back({"s" + std::to_string(i), 2005, -135.0 + 14.0 * i,
                           -135.0 + 13.0 * i, 10.0});
    const auto res = assemble_pixels(samples, stacks, tinySchema());
    for (std::size_t i = 0; i < res.table.rows(); ++i) {
        const auto row = res.table.row(i);
        CHECK(row[1] + row[2] + row[3] == doctest::Approx(1.0));
    }
}

TEST_CASE("assembly is deterministic and tables round-trip through CSV") {
    std::map<int, PredictorStack> stacks;
    stacks.emplace(2005, uniformStack(bigGeo(), 2.5f, lcmap::kTreeCover));
    std::vector<PlotRecord> plots;
    for (int i = 0; i < 5; ++i) {
        PlotRecord p;
        p.plot_id = "P" + std::to_string(i);
        p.year = 2005;
        p.x = -40.0 + 20.0 * i;
        p.y = -40.0 + 17.0 * i;
        p.agb = 10.0 * i;
        plots.push_back(p);
    }
    const auto r1 = assemble_plots(plots, stacks, tinySchema());
    const auto r2 = assemble_plots(plots, stacks, tinySchema());
    CHECK(r1.table.features == r2.table.features);
    CHECK(r1.table.response == r2.table.response);

    const auto dir = std::filesystem::temp_directory_path() / "agb_table_test";
    std::filesystem::create_directories(dir);
    write_table_csv(dir / "t.csv", r1.table);
    const auto back = read_table_csv(dir / "t.csv");
    CHECK(back.feature_names == r1.table.feature_names);
    CHECK(back.features == r1.table.features);
    CHECK(back.response == r1.table.response);
    CHECK(back.schema_hash() == r1.table.schema_hash());
    std::filesystem::remove_all(dir);
}

TEST_CASE("plots csv round trip and validation") {
    const auto dir = std::filesystem::temp_directory_path() / "agb_plots_test";
    std::filesystem::create_directories(dir);
    std::vector<PlotRecord> plots;
    PlotRecord p;
    p.plot_id = "X1";
    p.year = 2012;
    p.x = 123.456;
    p.y = -77.25;
    p.agb = 188.8;
    p.fully_forested = true;
    p.panel = 4;
    plots.push_back(p);
    write_plots_csv(dir / "p.csv", plots);
    const auto back = read_plots_csv(dir / "p.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].plot_id == "X1");
    CHECK(back[0].x == p.x);
    CHECK(back[0].agb == p.agb);
    CHECK(back[0].fully_forested);

    PlotRecord bad = p;
    bad.true_zero = true;  // true_zero with nonzero agb
    CHECK_THROWS_AS(validate(bad), DataError);
    bad = p;
    bad.panel = 6;
    CHECK_THROWS_AS(validate(bad), DataError);
    std::filesystem::remove_all(dir);
}
