#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agb/error.hpp"

namespace agb {

/// One named predictor. Categorical predictors carry their declared level
/// codes and expand to one 0/1 indicator column per level.
struct Predictor {
    enum class Kind { Continuous, Categorical };

    std::string name;
    Kind kind = Kind::Continuous;
    std::vector<int> levels;  // categorical only, >= 2 entries
};

/// Ordered predictor list. The schema is configuration, not code: the
/// synthetic world ships a reduced schema, the full 29-predictor reference
/// schema lives in configs/.
struct PredictorSchema {
    std::vector<Predictor> predictors;

    void validate() const;

    /// Total feature width after indicator expansion.
    std::size_t feature_width() const;

    /// Expanded column names: "NAME" or "NAME=LEVEL".
    std::vector<std::string> feature_names() const;

    /// Hash of the expanded column names; models refuse rows whose schema
    /// hash differs from the one they were fit with.
    std::string feature_hash() const;

    nlohmann::json to_json() const;
    static PredictorSchema from_json(const nlohmann::json& j);
    static PredictorSchema load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Hash of an arbitrary expanded-name list (same digest as feature_hash).
std::string feature_names_hash(const std::vector<std::string>& names);

}  // namespace agb
