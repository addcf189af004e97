#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "agb/grid_ops.hpp"
#include "agb/rng.hpp"

using namespace agb;

namespace {

GridGeoref geo4x4() {
    GridGeoref g;
    g.nrows = 4;
    g.ncols = 4;
    g.xll = 0.0;
    g.yll = 0.0;
    g.cellsize = 30.0;
    g.crs_tag = "test";
    return g;
}

}  // namespace

TEST_CASE("coverage: square polygon covering one full cell") {
    // cell (row 2, col 1) spans x [30,60), y [30,60)
    const auto poly = Polygon::rectangle(30.0, 30.0, 60.0, 60.0);
    const auto w = coverage_weights(poly, geo4x4());
    REQUIRE(w.entries.size() == 1);
    CHECK(w.entries[0].row == 2);
    CHECK(w.entries[0].col == 1);
    CHECK(w.entries[0].fraction == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coverage: half-cell rectangle") {
    const auto poly = Polygon::rectangle(30.0, 30.0, 45.0, 60.0);
    const auto w = coverage_weights(poly, geo4x4());
    REQUIRE(w.entries.size() == 1);
    CHECK(w.entries[0].fraction == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coverage: 7.32 m subplot circle as 64-gon inside one cell") {
    const auto poly = Polygon::regular_ngon({45.0, 45.0}, 7.32, 64);
    const auto w = coverage_weights(poly, geo4x4());
    REQUIRE(w.entries.size() == 1);
    const double analytic = 3.14159265358979323846 * 7.32 * 7.32 / 900.0;
    CHECK(w.entries[0].fraction == doctest::Approx(analytic).epsilon(0.002 / analytic));
}

TEST_CASE("coverage: area closure against the shoelace oracle") {
    Rng rng(99);
    GridGeoref geo;
    geo.nrows = 20;
    geo.ncols = 20;
    geo.cellsize = 30.0;
    geo.crs_tag = "test";
    for (int trial = 0; trial < 40; ++trial) {
        // random convex polygons fully inside the 600 m extent
        Polygon poly;
        const double cx = rng.uniform(60.0, 420.0);
        const double cy = rng.uniform(60.0, 420.0);
        if (trial % 3 == 0) {
            poly = Polygon::rectangle(cx, cy, cx + rng.uniform(5.0, 120.0),
                                      cy + rng.uniform(5.0, 120.0));
        } else {
            poly = Polygon::regular_ngon({cx, cy}, rng.uniform(3.0, 55.0),
                                         3 + static_cast<int>(rng.below(30)));
        }
        const auto w = coverage_weights(poly, geo);
        const double covered = w.total_fraction() * geo.cellsize * geo.cellsize;
        CHECK(covered == doctest::Approx(poly.area()).epsilon(0.005));
    }
}

TEST_CASE("coverage: polygon with a hole") {
    Polygon poly = Polygon::rectangle(30.0, 30.0, 60.0, 60.0);
    const Polygon hole = Polygon::rectangle(40.0, 40.0, 50.0, 50.0);
    poly.rings.push_back(hole.outer());
    const auto w = coverage_weights(poly, geo4x4());
    REQUIRE(w.entries.size() == 1);
    CHECK(w.entries[0].fraction == doctest::Approx((900.0 - 100.0) / 900.0).epsilon(1e-12));
}

TEST_CASE("coverage: polygon outside the extent") {
    const auto poly = Polygon::rectangle(1000.0, 1000.0, 1030.0, 1030.0);
    CHECK_THROWS_AS(coverage_weights(poly, geo4x4()), EmptyIntersection);
}

TEST_CASE("weighted_extract basics") {
    Grid g = Grid::filled(geo4x4(), 0.0f);
    g.at(0, 0) = 42.0f;
    CoverageWeights w;
    w.entries = {{0, 0, 1.0}};
    CHECK(weighted_extract(w, g) == doctest::Approx(42.0));

    g.at(0, 0) = 10.0f;
    g.at(0, 1) = 20.0f;
    w.entries = {{0, 0, 0.25}, {0, 1, 0.75}};
    CHECK(weighted_extract(w, g) == doctest::Approx(17.5));

    g.at(0, 1) = g.nodata;
    w.entries = {{0, 0, 0.5}, {0, 1, 0.5}};
    CHECK(weighted_extract(w, g) == doctest::Approx(10.0));

    g.at(0, 0) = g.nodata;
    CHECK(weighted_extract(w, g) == doctest::Approx(g.nodata));
}

TEST_CASE("weighted_extract is scale-equivariant") {
    Rng rng(5);
    Grid g = Grid::filled(geo4x4(), 0.0f);
    for (auto& v : g.values) v = static_cast<float>(rng.uniform(0.0, 300.0));
    CoverageWeights w;
    w.entries = {{0, 0, 0.3}, {1, 2, 0.9}, {3, 3, 0.11}};
    const double base = weighted_extract(w, g);
    for (double k : {2.0, -1.0, 0.25}) {
        Grid sc = g;
        for (auto& v : sc.values) v = static_cast<float>(v * k);
        CHECK(weighted_extract(w, sc) == doctest::Approx(k * base).epsilon(1e-6));
    }
}

TEST_CASE("majority_class rules") {
    ClassGrid cg = ClassGrid::filled(geo4x4(), lcmap::kTreeCover);
    CoverageWeights w;
    w.entries = {{0, 0, 1.0}};
    CHECK(majority_class(w, cg) == lcmap::kTreeCover);

    cg.at(0, 1) = lcmap::kWetland;
    w.entries = {{0, 0, 0.6}, {0, 1, 0.4}};
    CHECK(majority_class(w, cg) == lcmap::kTreeCover);

    // exact tie goes to the smaller code
    cg.at(0, 0) = lcmap::kGrassShrub;
    cg.at(0, 1) = lcmap::kTreeCover;
    w.entries = {{0, 0, 0.5}, {0, 1, 0.5}};
    CHECK(majority_class(w, cg) == lcmap::kGrassShrub);

    // argmax invariance under uniform scaling of fractions
    w.entries = {{0, 0, 0.25}, {0, 1, 0.25}};
    CHECK(majority_class(w, cg) == lcmap::kGrassShrub);

    ClassGrid zeros = ClassGrid::filled(geo4x4(), lcmap::kNodata);
    CHECK_THROWS_AS(majority_class(w, zeros), AllNodata);
}

TEST_CASE("mask_nonvegetated semantics and idempotence") {
    Grid agbGrid = Grid::filled(geo4x4(), 120.0f);
    ClassGrid cg = ClassGrid::filled(geo4x4(), lcmap::kTreeCover);
    cg.at(0, 0) = lcmap::kWater;
    cg.at(0, 1) = lcmap::kDeveloped;
    cg.at(0, 2) = lcmap::kCropland;
    cg.at(0, 3) = lcmap::kBarren;
    cg.at(1, 0) = lcmap::kNodata;
    cg.at(1, 1) = lcmap::kWetland;
    cg.at(1, 2) = lcmap::kGrassShrub;

    const Grid masked = mask_nonvegetated(agbGrid, cg);
    CHECK(masked.at(0, 0) == masked.nodata);
    CHECK(masked.at(0, 1) == masked.nodata);
    CHECK(masked.at(0, 2) == masked.nodata);
    CHECK(masked.at(0, 3) == masked.nodata);
    CHECK(masked.at(1, 0) == masked.nodata);
    CHECK(masked.at(1, 1) == 120.0f);
    CHECK(masked.at(1, 2) == 120.0f);
    CHECK(masked.at(2, 0) == 120.0f);

    const Grid twice = mask_nonvegetated(masked, cg);
    CHECK(twice.values == masked.values);

    // all-vegetated grid passes through untouched
    const ClassGrid veg = ClassGrid::filled(geo4x4(), lcmap::kTreeCover);
    CHECK(mask_nonvegetated(agbGrid, veg).values == agbGrid.values);

    GridGeoref other = geo4x4();
    other.ncols = 5;
    const ClassGrid misaligned = ClassGrid::filled(other, lcmap::kTreeCover);
    CHECK_THROWS_AS(mask_nonvegetated(agbGrid, misaligned), GridMismatch);
}

TEST_CASE("subtract semantics") {
    Grid a = Grid::filled(geo4x4(), 100.0f);
    Grid b = Grid::filled(geo4x4(), 40.0f);
    const Grid d = subtract(a, b);
    CHECK(d.at(2, 2) == 60.0f);

    const Grid z = subtract(a, a);
    for (float v : z.values) CHECK(v == 0.0f);

    a.at(0, 0) = a.nodata;
    const Grid dn = subtract(a, b);
    CHECK(dn.at(0, 0) == dn.nodata);
    b.at(3, 3) = b.nodata;
    CHECK(subtract(a, b).at(3, 3) == a.nodata);

    GridGeoref other = geo4x4();
    other.xll = 1.0;
    CHECK_THROWS_AS(subtract(a, Grid::filled(other, 1.0f)), GridMismatch);
}

TEST_CASE("class_summary") {
    Grid agbGrid = Grid::filled(geo4x4(), 50.0f);
    ClassGrid cg = ClassGrid::filled(geo4x4(), lcmap::kTreeCover);
    auto s = class_summary(agbGrid, cg);
    REQUIRE(s.size() == 1);
    CHECK(s.at(4).mean == doctest::Approx(50.0));
    CHECK(s.at(4).count == 16);

    // hand case: class 4 cells {10, 20}, class 6 cell {30}
    Grid g2 = Grid::filled(geo4x4(), 0.0f);
    ClassGrid c2 = ClassGrid::filled(geo4x4(), lcmap::kNodata);
    g2.at(0, 0) = 10.0f;
    c2.at(0, 0) = 4;
    g2.at(0, 1) = 20.0f;
    c2.at(0, 1) = 4;
    g2.at(0, 2) = 30.0f;
    c2.at(0, 2) = 6;
    auto s2 = class_summary(g2, c2);
    REQUIRE(s2.size() == 2);
    CHECK(s2.at(4).mean == doctest::Approx(15.0));
    CHECK(s2.at(4).count == 2);
    CHECK(s2.at(6).mean == doctest::Approx(30.0));
    CHECK(s2.at(6).count == 1);

    Grid empty = Grid::filled(geo4x4(), 0.0f);
    for (auto& v : empty.values) v = empty.nodata;
    CHECK(class_summary(empty, cg).empty());
}

TEST_CASE("grid io round trip is bit exact") {
    const auto dir = std::filesystem::temp_directory_path() / "agb_grid_io_test";
    std::filesystem::create_directories(dir);
    Rng rng(12);
    Grid g = Grid::filled(geo4x4(), 0.0f);
    for (auto& v : g.values) v = static_cast<float>(rng.uniform(-50.0, 350.0));
    g.at(1, 1) = g.nodata;
    write_grid(dir / "g", g);
    const Grid back = read_grid(dir / "g");
    CHECK(back.geo == g.geo);
    CHECK(back.values == g.values);
    CHECK(back.nodata == g.nodata);

    ClassGrid cg = ClassGrid::filled(geo4x4(), lcmap::kWetland);
    cg.at(0, 0) = lcmap::kNodata;
    write_class_grid(dir / "c", cg);
    const ClassGrid cback = read_class_grid(dir / "c");
    CHECK(cback.codes == cg.codes);

    CHECK_THROWS_AS(read_grid(dir / "missing"), IoError);
    CHECK_THROWS_AS(read_grid(dir / "c"), DataError);  // kind mismatch
    std::filesystem::remove_all(dir);
}
