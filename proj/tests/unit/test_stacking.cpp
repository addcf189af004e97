#include <doctest.h>

#include <cmath>

#include "agb/rng.hpp"
#include "agb/stacking.hpp"

using namespace agb;

namespace {

// Stub learners for held-out and recovery properties. The oracle stub
// knows the generating function and ignores the training data entirely;
// the noise stub hashes the feature vector; the mean stub actually uses
// the training responses.

double generating_fn(std::span<const double> x) {
    return 40.0 + 25.0 * x[0] - 10.0 * x[1] + 4.0 * x[0] * x[1];
}

class OracleStub final : public Model {
public:
    std::string kind() const override { return "stub-oracle"; }
    double predict_row(std::span<const double> x) const override { return generating_fn(x); }
    nlohmann::json structure_json() const override { return {}; }
};

class NoiseStub final : public Model {
public:
    std::string kind() const override { return "stub-noise"; }
    double predict_row(std::span<const double> x) const override {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (double v : x) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    nlohmann::json structure_json() const override { return {}; }
};

class MeanStub final : public Model {
public:
    explicit MeanStub(double mean) : mean_(mean) {}
    std::string kind() const override { return "stub-mean"; }
    double predict_row(std::span<const double>) const override { return mean_; }
    nlohmann::json structure_json() const override { return {}; }

private:
    double mean_;
};

Component oracleComponent() {
    return {"oracle", [](const TrainingTable&, std::uint64_t) {
                return std::unique_ptr<Model>(new OracleStub());
            }};
}

Component noiseComponent() {
    return {"noise", [](const TrainingTable&, std::uint64_t) {
                return std::unique_ptr<Model>(new NoiseStub());
            }};
}

Component meanComponent() {
    return {"mean", [](const TrainingTable& t, std::uint64_t) {
                double m = 0.0;
                for (double y : t.response) m += y;
                return std::unique_ptr<Model>(
                    new MeanStub(m / static_cast<double>(t.rows())));
            }};
}

TrainingTable syntheticRows(std::size_t n, std::uint64_t seed, double noiseSd) {
    TrainingTable t;
    t.feature_names = {"x0", "x1"};
    Rng rng(seed);
    std::vector<double> row(2);
    for (std::size_t i = 0; i < n; ++i) {
        row[0] = rng.uniform(0.0, 4.0);
        row[1] = rng.uniform(0.0, 4.0);
        t.push_row(generating_fn(row) + rng.normal(0.0, noiseSd), row, "plot", 2005, 0.0,
                   0.0);
    }
    return t;
}

}  // namespace

TEST_CASE("loo_stack recovers the informative component") {
    const auto t = syntheticRows(200, 600, 0.1);
    const auto e = loo_stack(t, {oracleComponent(), noiseComponent()}, 7);
    REQUIRE(e.beta.size() == 3);
    CHECK(std::abs(e.beta[0]) < 0.05);
    CHECK(e.beta[1] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(e.beta[2]) < 0.05);
    CHECK(e.loo.rows == 200);
    CHECK(e.loo.cols == 2);
}

TEST_CASE("loo matrix row i never depends on response i") {
    auto t = syntheticRows(30, 601, 1.0);
    const auto before = loo_stack(t, {meanComponent()}, 3);

    t.response[7] += 50.0;  // perturb one response
    const auto after = loo_stack(t, {meanComponent()}, 3);

    // row 7 is fit without row 7: unchanged
    CHECK(after.loo.at(7, 0) == before.loo.at(7, 0));
    // every other row's fit saw the perturbation
    for (std::size_t i = 0; i < 30; ++i)
        if (i != 7) CHECK(after.loo.at(i, 0) != before.loo.at(i, 0));
}

TEST_CASE("constant component makes the meta fit rank deficient") {
    const auto t = syntheticRows(20, 602, 1.0);
    Component constant{"const", [](const TrainingTable&, std::uint64_t) {
                           return std::unique_ptr<Model>(new MeanStub(5.0));
                       }};
    CHECK_THROWS_AS(loo_stack(t, {constant}, 1), RankDeficient);
}

TEST_CASE("duplicate components make the meta fit rank deficient") {
    const auto t = syntheticRows(25, 603, 1.0);
    CHECK_THROWS_AS(loo_stack(t, {oracleComponent(), oracleComponent()}, 1), RankDeficient);
}

TEST_CASE("loo matrix shape for a single rf component") {
    const auto t = syntheticRows(10, 604, 0.5);
    ComponentSpec spec{"rf", {{"num_trees", 5}, {"min_node_size", 2}}};
    const auto e = loo_stack(t, {make_component(spec)}, 9);
    CHECK(e.loo.rows == 10);
    CHECK(e.loo.cols == 1);
    CHECK(e.component_kinds == std::vector<std::string>{"rf"});
}

TEST_CASE("oof approximation keeps the held-out property per fold") {
    auto t = syntheticRows(40, 605, 1.0);
    StackOptions opts;
    opts.oof_folds = 5;
    const auto e = loo_stack(t, {oracleComponent(), noiseComponent()}, 11, opts);
    CHECK(e.loo.rows == 40);
    CHECK(e.oof_folds == 5);
    // determinism of the fold split
    const auto e2 = loo_stack(t, {oracleComponent(), noiseComponent()}, 11, opts);
    CHECK(e.loo.a == e2.loo.a);
}

TEST_CASE("paper-coefficient fixtures reproduce the published arithmetic") {
    // direct ensemble: beta = (-12.223, RF 0.733, LGB 0.091, SVM 0.277)
    StackedEnsemble direct;
    direct.beta = {-12.223, 0.733, 0.091, 0.277};
    for (int i = 0; i < 3; ++i)
        direct.components.push_back(std::make_unique<OlsModel>(std::vector<double>{100.0}));
    direct.component_kinds = {"rf", "gbm", "svr"};
    const std::vector<double> anyRow{0.0};
    CHECK(direct.predict_row(anyRow) == doctest::Approx(97.877).epsilon(1e-9 / 97.877));

    // indirect ensemble: beta = (-4.067, RF 0.335, LGB 0.688), components at 50
    StackedEnsemble indirect;
    indirect.beta = {-4.067, 0.335, 0.688};
    for (int i = 0; i < 2; ++i)
        indirect.components.push_back(std::make_unique<OlsModel>(std::vector<double>{50.0}));
    indirect.component_kinds = {"rf", "gbm"};
    CHECK(indirect.predict_row(anyRow) == doctest::Approx(47.083).epsilon(1e-9 / 47.083));

    // identity passthrough: beta = (0, 1)
    StackedEnsemble identity;
    identity.beta = {0.0, 1.0};
    identity.components.push_back(std::make_unique<OlsModel>(std::vector<double>{123.0}));
    identity.component_kinds = {"rf"};
    CHECK(identity.predict_row(anyRow) == doctest::Approx(123.0));
}

TEST_CASE("predict_averaged semantics") {
    auto mkConstant = [](double v) {
        StackedEnsemble e;
        e.beta = {0.0, 1.0};
        e.components.push_back(std::make_unique<OlsModel>(std::vector<double>{v}));
        e.component_kinds = {"rf"};
        return e;
    };
    AveragedEnsemble avg;
    avg.direct = mkConstant(100.0);
    avg.indirect = mkConstant(50.0);

    TrainingTable rows;
    rows.feature_names = {"x"};
    rows.push_row(0.0, std::vector<double>{1.0}, "plot", 2005, 0.0, 0.0);
    const auto out = predict_averaged(avg, rows);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(75.0));

    // identical members collapse to either member
    avg.indirect = mkConstant(100.0);
    CHECK(predict_averaged(avg, rows)[0] == doctest::Approx(100.0));

    // exact equality with the componentwise mean
    avg.indirect = mkConstant(42.0);
    const auto d = predict_stacked(avg.direct, rows);
    const auto i = predict_stacked(avg.indirect, rows);
    const auto a = predict_averaged(avg, rows);
    CHECK(a[0] == (d[0] + i[0]) / 2.0);
}

TEST_CASE("mean error of the average is the mean of member mean errors") {
    const auto t = syntheticRows(50, 606, 2.0);
    auto direct = loo_stack(t, {oracleComponent(), noiseComponent()}, 21);
    auto indirect = loo_stack(t, {oracleComponent()}, 22);

    const auto pd = direct.predict(t);
    const auto pi = indirect.predict(t);
    AveragedEnsemble avg;
    avg.direct = std::move(direct);
    avg.indirect = std::move(indirect);
    const auto pa = predict_averaged(avg, t);

    double meD = 0.0, meI = 0.0, meA = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        meD += t.response[i] - pd[i];
        meI += t.response[i] - pi[i];
        meA += t.response[i] - pa[i];
    }
    CHECK(meA == doctest::Approx((meD + meI) / 2.0).epsilon(1e-9));
}

TEST_CASE("stacked ensemble serialization round trip") {
    const auto t = syntheticRows(15, 607, 0.5);
    ComponentSpec rf{"rf", {{"num_trees", 4}, {"min_node_size", 2}}};
    ComponentSpec gbm{"gbm",
                      {{"num_rounds", 5}, {"num_leaves", 3}, {"min_data_in_leaf", 2},
                       {"min_data_in_bin", 1}}};
    const auto e = loo_stack(t, {make_component(rf), make_component(gbm)}, 33);
    const auto back = StackedEnsemble::from_json(e.to_json());
    CHECK(back.beta == e.beta);
    CHECK(back.loo.a == e.loo.a);
    for (std::size_t i = 0; i < t.rows(); ++i)
        CHECK(back.predict(t)[i] == e.predict(t)[i]);
}

TEST_CASE("loo_stack requires components + 2 rows") {
    const auto t = syntheticRows(3, 608, 0.1);
    CHECK_THROWS_AS(loo_stack(t, {oracleComponent(), noiseComponent()}, 1), DataError);
}
