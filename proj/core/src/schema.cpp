#include <cstdio>
#include <fstream>
#include <set>

#include "agb/rng.hpp"
#include "agb/schema.hpp"

namespace agb {

void PredictorSchema::validate() const {
    std::set<std::string> seen;
    for (const auto& p : predictors) {
        if (p.name.empty()) throw ConfigError("schema: empty predictor name");
        if (!seen.insert(p.name).second)
            throw ConfigError("schema: duplicate predictor name '" + p.name + "'");
        if (p.kind == Predictor::Kind::Categorical) {
            if (p.levels.size() < 2)
                throw ConfigError("schema: categorical '" + p.name + "' needs >= 2 levels");
            std::set<int> lv(p.levels.begin(), p.levels.end());
            if (lv.size() != p.levels.size())
                throw ConfigError("schema: duplicate level in '" + p.name + "'");
        } else if (!p.levels.empty()) {
            throw ConfigError("schema: continuous '" + p.name + "' declares levels");
        }
    }
}

std::size_t PredictorSchema::feature_width() const {
    std::size_t w = 0;
    for (const auto& p : predictors)
        w += p.kind == Predictor::Kind::Continuous ? 1 : p.levels.size();
    return w;
}

std::vector<std::string> PredictorSchema::feature_names() const {
    std::vector<std::string> names;
    names.reserve(feature_width());
    for (const auto& p : predictors) {
        if (p.kind == Predictor::Kind::Continuous) {
            names.push_back(p.name);
        } else {
            for (int lv : p.levels) names.push_back(p.name + "=" + std::to_string(lv));
        }
    }
    return names;
}

std::string feature_names_hash(const std::vector<std::string>& names) {
    std::string joined;
    for (const auto& n : names) {
        joined += n;
        joined += '\n';
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(joined)));
    return buf;
}

std::string PredictorSchema::feature_hash() const { return feature_names_hash(feature_names()); }

nlohmann::json PredictorSchema::to_json() const {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& p : predictors) {
        nlohmann::json jp = {{"name", p.name},
                             {"kind", p.kind == Predictor::Kind::Continuous ? "continuous"
                                                                            : "categorical"}};
        if (p.kind == Predictor::Kind::Categorical) jp["levels"] = p.levels;
        preds.push_back(std::move(jp));
    }
    return {{"predictors", preds}};
}

PredictorSchema PredictorSchema::from_json(const nlohmann::json& j) {
    PredictorSchema s;
    for (const auto& jp : j.at("predictors")) {
        Predictor p;
        p.name = jp.at("name").get<std::string>();
        const auto kind = jp.at("kind").get<std::string>();
        if (kind == "continuous") {
            p.kind = Predictor::Kind::Continuous;
        } else if (kind == "categorical") {
            p.kind = Predictor::Kind::Categorical;
            p.levels = jp.at("levels").get<std::vector<int>>();
        } else {
            throw ConfigError("schema: unknown predictor kind '" + kind + "'");
        }
        s.predictors.push_back(std::move(p));
    }
    s.validate();
    return s;
}

PredictorSchema PredictorSchema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad schema json " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

void PredictorSchema::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << to_json().dump(2) << '\n';
}

}  // namespace agb
