#include <cmath>

#include "agb/learners.hpp"
#include "agb/parallel.hpp"
#include "agb/rng.hpp"
#include "agb/tree_grow.hpp"

namespace agb {

void RfParams::validate(std::size_t n_features) const {
    if (num_trees < 1) throw InvalidParams("rf: num_trees must be >= 1");
    if (min_node_size < 1) throw InvalidParams("rf: min_node_size must be >= 1");
    if (sample_fraction <= 0.0 || sample_fraction > 1.0)
        throw InvalidParams("rf: sample_fraction must be in (0,1]");
    if (mtry < 0 || (mtry != 0 && static_cast<std::size_t>(mtry) > n_features))
        throw InvalidParams("rf: mtry must be in 1..n_features (0 = sqrt default)");
}

nlohmann::json RfParams::to_json() const {
    return {{"num_trees", num_trees},   {"mtry", mtry},
            {"min_node_size", min_node_size}, {"sample_fraction", sample_fraction},
            {"replace", replace},       {"seed", seed}};
}

RfParams RfParams::from_json(const nlohmann::json& j) {
    RfParams p;
    p.num_trees = j.value("num_trees", p.num_trees);
    p.mtry = j.value("mtry", p.mtry);
    p.min_node_size = j.value("min_node_size", p.min_node_size);
    p.sample_fraction = j.value("sample_fraction", p.sample_fraction);
    p.replace = j.value("replace", p.replace);
    p.seed = j.value("seed", p.seed);
    return p;
}

double RfModel::predict_row(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x);
    return s / static_cast<double>(trees.size());
}

nlohmann::json RfModel::structure_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return {{"trees", arr}};
}

std::unique_ptr<RfModel> RfModel::from_structure(const nlohmann::json& j) {
    auto m = std::make_unique<RfModel>();
    for (const auto& jt : j.at("trees")) m->trees.push_back(RegressionTree::from_json(jt));
    if (m->trees.empty()) throw DataError("rf: no trees in serialized model");
    return m;
}

std::unique_ptr<RfModel> fit_rf(const TrainingTable& train, const RfParams& p, int threads) {
    const std::size_t n = train.rows();
    const std::size_t nf = train.width();
    if (n == 0) throw DataError("rf: empty training table");
    p.validate(nf);

    CartParams cart;
    cart.mtry = p.mtry == 0
                    ? std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(nf)))))
                    : p.mtry;
    cart.min_node_size = p.min_node_size;

    const auto nSample = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) * p.sample_fraction));

    auto m = std::make_unique<RfModel>();
    m->trees.resize(p.num_trees);
    m->params = p.to_json();
    m->schema_hash = train.schema_hash();
    m->seed = p.seed;
    m->n_train = n;

    // One labeled stream per tree; identical forests for any thread count.
    parallel_for(static_cast<std::size_t>(p.num_trees), threads, [&](std::size_t ti) {
        Rng rng(derive_seed(p.seed, "tree", ti));
        std::vector<std::size_t> rows;
        rows.reserve(nSample);
        if (p.replace) {
            for (std::size_t k = 0; k < nSample; ++k) rows.push_back(rng.below(n));
        } else {
            std::vector<std::size_t> pool(n);
            for (std::size_t i = 0; i < n; ++i) pool[i] = i;
            for (std::size_t k = 0; k < nSample; ++k) {
                const std::size_t pick = k + rng.below(n - k);
                std::swap(pool[k], pool[pick]);
                rows.push_back(pool[k]);
            }
        }
        m->trees[ti] = grow_cart(train, std::move(rows), cart, rng);
    });
    return m;
}

}  // namespace agb
