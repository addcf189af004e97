#include <fstream>

#include "agb/learners.hpp"
#include "agb/model.hpp"

namespace agb {

nlohmann::json Model::to_json() const {
    return {{"format_version", kModelFormatVersion},
            {"kind", kind()},
            {"schema_hash", schema_hash},
            {"params", params},
            {"seed", seed},
            {"n_train", n_train},
            {"structure", structure_json()}};
}

void check_schema(const Model& m, const std::string& hash) {
    if (!m.schema_hash.empty() && m.schema_hash != hash)
        throw SchemaMismatch("model fit with schema " + m.schema_hash +
                             ", applied to schema " + hash);
}

std::vector<double> predict(const Model& m, const TrainingTable& rows) {
    check_schema(m, rows.schema_hash());
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = m.predict_row(rows.row(i));
    return out;
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
        throw DataError("model: unsupported format_version " + std::to_string(version));
    const auto kind = j.at("kind").get<std::string>();
    const auto& s = j.at("structure");

    std::unique_ptr<Model> m;
    if (kind == "ols")
        m = OlsModel::from_structure(s);
    else if (kind == "rf")
        m = RfModel::from_structure(s);
    else if (kind == "gbm")
        m = GbmModel::from_structure(s);
    else if (kind == "svr")
        m = SvrModel::from_structure(s);
    else
        throw DataError("model: unknown kind '" + kind + "'");

    m->schema_hash = j.value("schema_hash", std::string());
    m->params = j.value("params", nlohmann::json::object());
    m->seed = j.value("seed", std::uint64_t{0});
    m->n_train = j.value("n_train", std::size_t{0});
    return m;
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model json " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const Model& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << m.to_json().dump() << '\n';
}

}  // namespace agb
