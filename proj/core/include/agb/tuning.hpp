#pragma once

#include <map>

#include "agb/stacking.hpp"

namespace agb {

/// Grid axes are per-parameter value lists applied over a base parameter
/// set. Refinement rounds re-center each axis on the incumbent value with
/// halved spacing.
struct TuneGrid {
    std::map<std::string, std::vector<double>> axes;
    int folds = 5;
    int refine_rounds = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CvCell {
    nlohmann::json params;
    int fold = 0;
    double rmse = 0.0;
    std::string error;  // non-empty when the fit failed; recorded, not fatal
};

struct TuneResult {
    nlohmann::json best_params;
    double best_rmse = 0.0;
    std::vector<CvCell> table;
};

/// Evaluates every axis combination by k-fold CV RMSE (folds seeded from
/// the grid seed and shared across combinations), then refines around the
/// incumbent. Per-cell learner errors are recorded in the CV table.
TuneResult grid_search(const TrainingTable& train, const TuneGrid& grid,
                       const std::string& comp_kind, const nlohmann::json& base_params,
                       int threads = 1);

void write_tuning_csv(const std::filesystem::path& path, const std::string& comp_kind,
                      const std::vector<CvCell>& table);

}  // namespace agb
