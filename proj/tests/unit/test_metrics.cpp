#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "agb/metrics.hpp"
#include "agb/rng.hpp"

using namespace agb;

namespace {

EvalPairs randomPairs(std::size_t n, std::uint64_t seed) {
    EvalPairs p;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = rng.uniform(1.0, 300.0);
        p.push(y, y + rng.normal(0.0, 25.0));
    }
    return p;
}

}  // namespace

TEST_CASE("metrics: perfect agreement") {
    EvalPairs p;
    for (int i = 1; i <= 10; ++i) p.push(i * 10.0, i * 10.0);
    const auto m = point_metrics(p);
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK(m.me == 0.0);
    CHECK(m.r2 == doctest::Approx(1.0));
}

TEST_CASE("metrics: hand-computed case y=[1,3], yhat=[2,2]") {
    EvalPairs p;
    p.push(1.0, 2.0);
    p.push(3.0, 2.0);
    const auto m = point_metrics(p);
    CHECK(m.rmse == doctest::Approx(1.0));
    CHECK(m.mae == doctest::Approx(1.0));
    CHECK(m.me == doctest::Approx(0.0));
    CHECK(m.prmse == doctest::Approx(50.0));
    CHECK(m.pmae == doctest::Approx(50.0));
    CHECK(m.r2 == doctest::Approx(0.0));
}

TEST_CASE("metrics: constant prediction at the mean gives r2 = 0") {
    EvalPairs p;
    for (double y : {5.0, 10.0, 15.0, 30.0}) p.push(y, 15.0);
    CHECK(point_metrics(p).r2 == doctest::Approx(0.0));
}

TEST_CASE("metrics: ME follows reference-minus-predicted exactly") {
    const auto p = randomPairs(100, 1);
    const auto m = point_metrics(p);
    double negMean = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) negMean += p.pred[i] - p.ref[i];
    negMean /= static_cast<double>(p.n());
    CHECK(m.me == doctest::Approx(-negMean).epsilon(1e-12));
}

TEST_CASE("metrics: rmse >= mae for random pair sets") {
    for (std::uint64_t seed = 10; seed < 25; ++seed) {
        const auto m = point_metrics(randomPairs(40, seed));
        CHECK(m.rmse >= m.mae);
    }
}

TEST_CASE("metrics: SE formulas implemented literally") {
    const auto p = randomPairs(50, 2);
    const auto m = metrics(p, 0, 0);

    // independent recomputation of the printed formulas
    std::vector<double> absErr, sgnErr;
    for (std::size_t i = 0; i < p.n(); ++i) {
        absErr.push_back(std::abs(p.ref[i] - p.pred[i]));
        sgnErr.push_back(p.ref[i] - p.pred[i]);
    }
    auto sampleSd = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / (v.size() - 1));
    };
    CHECK(m.se_mae == doctest::Approx(sampleSd(absErr)).epsilon(1e-12));
    CHECK(m.se_me == doctest::Approx(sampleSd(sgnErr)).epsilon(1e-12));
}

TEST_CASE("metrics: bootstrap SEs deterministic and permutation invariant") {
    const auto p = randomPairs(60, 3);
    const auto a = metrics(p, 300, 42);
    const auto b = metrics(p, 300, 42);
    CHECK(a.se_rmse == b.se_rmse);
    CHECK(a.se_r2 == b.se_r2);

    // permute the pairs; the multiset is unchanged
    EvalPairs shuffled = p;
    Rng rng(9);
    for (std::size_t i = shuffled.n() - 1; i > 0; --i) {
        const std::size_t j = rng.below(i + 1);
        std::swap(shuffled.ref[i], shuffled.ref[j]);
        std::swap(shuffled.pred[i], shuffled.pred[j]);
    }
    const auto c = metrics(shuffled, 300, 42);
    CHECK(c.se_rmse == a.se_rmse);
    CHECK(c.se_r2 == a.se_r2);
    CHECK(c.rmse == doctest::Approx(a.rmse).epsilon(1e-12));

    const auto d = metrics(p, 300, 43);
    CHECK(d.se_rmse != a.se_rmse);
}

TEST_CASE("metrics: degenerate inputs raise") {
    EvalPairs one;
    one.push(10.0, 12.0);
    CHECK_THROWS_AS(metrics(one, 100, 0), DegenerateInput);

    EvalPairs zeroMean;
    zeroMean.push(-5.0, 1.0);
    zeroMean.push(5.0, 2.0);
    CHECK_THROWS_AS(point_metrics(zeroMean), DegenerateInput);

    EvalPairs empty;
    CHECK_THROWS_AS(point_metrics(empty), DegenerateInput);
}

TEST_CASE("gmfr: slope-2 hand case") {
    EvalPairs p;
    p.push(2.0, 1.0);
    p.push(4.0, 2.0);
    p.push(6.0, 3.0);
    const auto g = gmfr(p);
    CHECK(g.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g.intercept == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("gmfr: identity line for perfect predictions") {
    EvalPairs p;
    for (double v : {3.0, 8.0, 21.0, 34.0}) p.push(v, v);
    const auto g = gmfr(p);
    CHECK(g.slope == doctest::Approx(1.0));
    CHECK(g.intercept == doctest::Approx(0.0).scale(1));
}

TEST_CASE("gmfr: negating the predictions negates the slope") {
    auto p = randomPairs(30, 4);
    const auto g = gmfr(p);
    EvalPairs neg = p;
    for (auto& v : neg.pred) v = -v;
    const auto gn = gmfr(neg);
    CHECK(gn.slope == doctest::Approx(-g.slope).epsilon(1e-12));
}

TEST_CASE("gmfr: reciprocal slopes when axes swap") {
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        const auto p = randomPairs(50, seed);
        const auto g = gmfr(p);
        EvalPairs swapped;
        swapped.ref = p.pred;
        swapped.pred = p.ref;
        const auto gs = gmfr(swapped);
        CHECK(g.slope * gs.slope == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("gmfr: zero variance raises") {
    EvalPairs p;
    p.push(1.0, 5.0);
    p.push(2.0, 5.0);
    CHECK_THROWS_AS(gmfr(p), DegenerateInput);
}
