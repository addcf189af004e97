#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agb/table.hpp"

namespace agb {

/// Fitted regressor. Immutable after fit; predict is pure and safe to call
/// concurrently. Serialization is versioned JSON so any language can
/// reload a model.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string kind() const = 0;
    virtual double predict_row(std::span<const double> features) const = 0;

    /// Kind-specific payload of to_json().
    virtual nlohmann::json structure_json() const = 0;

    nlohmann::json to_json() const;

    // Fit metadata. An empty schema_hash disables the predict-time check
    // (hand-built fixtures); every fit_* sets it.
    std::string schema_hash;
    nlohmann::json params;
    std::uint64_t seed = 0;
    std::size_t n_train = 0;
};

/// Deterministic predictions for every row; throws SchemaMismatch when the
/// table's feature schema differs from the model's.
std::vector<double> predict(const Model& m, const TrainingTable& rows);

void check_schema(const Model& m, const std::string& hash);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const Model& m);

constexpr int kModelFormatVersion = 1;

}  // namespace agb
