#include <numeric>

#include "agb/parallel.hpp"
#include "agb/rng.hpp"
#include "agb/stacking.hpp"

namespace agb {

Component make_component(const ComponentSpec& spec, int threads) {
    if (spec.kind == "rf") {
        auto base = RfParams::from_json(spec.params);
        return {"rf", [base, threads](const TrainingTable& t, std::uint64_t seed) {
                    RfParams p = base;
                    p.seed = seed;
                    return std::unique_ptr<Model>(fit_rf(t, p, threads));
                }};
    }
    if (spec.kind == "gbm") {
        auto base = GbmParams::from_json(spec.params);
        return {"gbm", [base](const TrainingTable& t, std::uint64_t seed) {
                    GbmParams p = base;
                    p.seed = seed;
                    return std::unique_ptr<Model>(fit_gbm(t, p));
                }};
    }
    if (spec.kind == "svr") {
        auto base = SvrParams::from_json(spec.params);
        return {"svr", [base](const TrainingTable& t, std::uint64_t seed) {
                    SvrParams p = base;
                    p.seed = seed;
                    return std::unique_ptr<Model>(fit_svr(t, p));
                }};
    }
    throw ConfigError("unknown component kind '" + spec.kind + "'");
}

double StackedEnsemble::predict_row(std::span<const double> features) const {
    double v = beta[0];
    for (std::size_t j = 0; j < components.size(); ++j)
        v += beta[j + 1] * components[j]->predict_row(features);
    return v;  // no clamping: negative intercepts can yield negative values
}

std::vector<double> StackedEnsemble::predict(const TrainingTable& rows) const {
    for (const auto& c : components) check_schema(*c, rows.schema_hash());
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_row(rows.row(i));
    return out;
}

std::vector<double> predict_stacked(const StackedEnsemble& e, const TrainingTable& rows) {
    return e.predict(rows);
}

nlohmann::json StackedEnsemble::to_json(bool include_loo) const {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : components) comps.push_back(c->to_json());
    nlohmann::json j = {{"format_version", kModelFormatVersion},
                        {"kind", "stacked"},
                        {"beta", beta},
                        {"components", comps},
                        {"component_kinds", component_kinds},
                        {"seed", seed},
                        {"oof_folds", oof_folds},
                        {"schema_hash", schema_hash}};
    if (include_loo && loo.rows > 0)
        j["loo_matrix"] = {{"rows", loo.rows}, {"cols", loo.cols}, {"values", loo.a}};
    return j;
}

StackedEnsemble StackedEnsemble::from_json(const nlohmann::json& j) {
    if (j.at("kind").get<std::string>() != "stacked")
        throw DataError("ensemble: expected kind \"stacked\"");
    StackedEnsemble e;
    e.beta = j.at("beta").get<std::vector<double>>();
    for (const auto& jc : j.at("components")) e.components.push_back(model_from_json(jc));
    e.component_kinds = j.at("component_kinds").get<std::vector<std::string>>();
    e.seed = j.value("seed", std::uint64_t{0});
    e.oof_folds = j.value("oof_folds", 0);
    e.schema_hash = j.value("schema_hash", std::string());
    if (e.beta.size() != e.components.size() + 1)
        throw DataError("ensemble: beta count != components + 1");
    if (j.contains("loo_matrix")) {
        const auto& jl = j.at("loo_matrix");
        e.loo = Matrix(jl.at("rows").get<std::size_t>(), jl.at("cols").get<std::size_t>());
        e.loo.a = jl.at("values").get<std::vector<double>>();
    }
    return e;
}

StackedEnsemble loo_stack(const TrainingTable& train, const std::vector<Component>& comps,
                          std::uint64_t seed, const StackOptions& opts) {
    const std::size_t n = train.rows();
    const std::size_t k = comps.size();
    if (k == 0) throw ConfigError("loo_stack: no components");
    if (n < k + 2)
        throw DataError("loo_stack: need at least components + 2 rows, got " +
                        std::to_string(n));

    StackedEnsemble e;
    e.seed = seed;
    e.oof_folds = opts.oof_folds;
    e.schema_hash = train.schema_hash();
    e.loo = Matrix(n, k);
    for (const auto& c : comps) e.component_kinds.push_back(c.kind);

    if (opts.oof_folds == 0) {
        // Exact LOO: each fit excludes exactly one row, so the held-out
        // prediction for row i never depends on y_i.
        parallel_for(n * k, opts.threads, [&](std::size_t task) {
            const std::size_t i = task / k;
            const std::size_t j = task % k;
            std::vector<std::size_t> rows;
            rows.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r)
                if (r != i) rows.push_back(r);
            const TrainingTable sub = subset(train, rows);
            auto m = comps[j].fit(sub, derive_seed(seed, "loo:" + comps[j].kind, i));
            e.loo.at(i, j) = m->predict_row(train.row(i));
        });
    } else {
        if (opts.oof_folds < 2 || static_cast<std::size_t>(opts.oof_folds) > n)
            throw ConfigError("loo_stack: oof_folds must be in 2..n");
        const auto folds = static_cast<std::size_t>(opts.oof_folds);
        std::vector<std::size_t> fold(n);
        {
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            Rng rng(derive_seed(seed, "oof"));
            for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
            for (std::size_t i = 0; i < n; ++i) fold[idx[i]] = i % folds;
        }
        parallel_for(folds * k, opts.threads, [&](std::size_t task) {
            const std::size_t f = task / k;
            const std::size_t j = task % k;
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < n; ++r)
                if (fold[r] != f) rows.push_back(r);
            const TrainingTable sub = subset(train, rows);
            auto m = comps[j].fit(sub, derive_seed(seed, "oof:" + comps[j].kind, f));
            for (std::size_t r = 0; r < n; ++r)
                if (fold[r] == f) e.loo.at(r, j) = m->predict_row(train.row(r));
        });
    }

    auto meta = fit_ols(e.loo, train.response);
    e.beta = meta->beta();

    // Final components refit on all n rows.
    e.components.resize(k);
    parallel_for(k, opts.threads, [&](std::size_t j) {
        e.components[j] = comps[j].fit(train, derive_seed(seed, "final:" + comps[j].kind));
    });
    return e;
}

double AveragedEnsemble::predict_row(std::span<const double> features) const {
    return (direct.predict_row(features) + indirect.predict_row(features)) / 2.0;
}

std::vector<double> predict_averaged(const AveragedEnsemble& a, const TrainingTable& rows) {
    const auto d = a.direct.predict(rows);
    const auto i = a.indirect.predict(rows);
    std::vector<double> out(d.size());
    for (std::size_t r = 0; r < d.size(); ++r) out[r] = (d[r] + i[r]) / 2.0;
    return out;
}

nlohmann::json AveragedEnsemble::to_json() const {
    return {{"format_version", kModelFormatVersion},
            {"kind", "averaged"},
            {"direct", direct.to_json(false)},
            {"indirect", indirect.to_json(false)}};
}

AveragedEnsemble AveragedEnsemble::from_json(const nlohmann::json& j) {
    if (j.at("kind").get<std::string>() != "averaged")
        throw DataError("ensemble: expected kind \"averaged\"");
    AveragedEnsemble a;
    a.direct = StackedEnsemble::from_json(j.at("direct"));
    a.indirect = StackedEnsemble::from_json(j.at("indirect"));
    return a;
}

}  // namespace agb
