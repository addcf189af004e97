#pragma once

#include <functional>

#include "agb/learners.hpp"
#include "agb/linalg.hpp"
#include "agb/model.hpp"

namespace agb {

/// A learner the stacker can fit: kind label plus a fit function. Tests
/// substitute stub learners through the same interface.
struct Component {
    std::string kind;
    std::function<std::unique_ptr<Model>(const TrainingTable&, std::uint64_t seed)> fit;
};

/// Production component for one of the paper's model families.
/// kind in {"rf", "gbm", "svr"}; params are the matching *Params JSON.
struct ComponentSpec {
    std::string kind;
    nlohmann::json params;
};

Component make_component(const ComponentSpec& spec, int threads = 1);

struct StackOptions {
    /// 0 = exact leave-one-out (the paper's procedure). k >= 2 switches to
    /// a k-fold out-of-fold approximation for large tables; this is
    /// explicitly non-paper behavior and is recorded in the ensemble
    /// metadata.
    int oof_folds = 0;
    int threads = 1;
};

/// Component learners whose held-out predictions feed an OLS meta-model.
class StackedEnsemble {
public:
    std::vector<std::unique_ptr<Model>> components;
    std::vector<std::string> component_kinds;
    std::vector<double> beta;  // meta coefficients, beta[0] = intercept
    Matrix loo;                // n_rows x n_components held-out predictions
    std::uint64_t seed = 0;
    int oof_folds = 0;
    std::string schema_hash;

    double predict_row(std::span<const double> features) const;
    std::vector<double> predict(const TrainingTable& rows) const;

    nlohmann::json to_json(bool include_loo = true) const;
    static StackedEnsemble from_json(const nlohmann::json& j);
};

/// Fits every component on n-1 rows for each row, regresses the response
/// on the held-out prediction columns (plus intercept) by OLS, then refits
/// the components on all rows. Throws RankDeficient when the meta columns
/// are collinear.
StackedEnsemble loo_stack(const TrainingTable& train, const std::vector<Component>& comps,
                          std::uint64_t seed, const StackOptions& opts = {});

std::vector<double> predict_stacked(const StackedEnsemble& e, const TrainingTable& rows);

/// Mean of the direct and indirect stacked predictions.
struct AveragedEnsemble {
    StackedEnsemble direct;
    StackedEnsemble indirect;

    double predict_row(std::span<const double> features) const;

    nlohmann::json to_json() const;
    static AveragedEnsemble from_json(const nlohmann::json& j);
};

std::vector<double> predict_averaged(const AveragedEnsemble& a, const TrainingTable& rows);

}  // namespace agb
