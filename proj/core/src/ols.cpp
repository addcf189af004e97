#include "agb/learners.hpp"

namespace agb {

double OlsModel::predict_row(std::span<const double> features) const {
    // intercept-only models are constant functions and accept any row width
    if (beta_.size() > 1 && features.size() + 1 != beta_.size())
        throw SchemaMismatch("ols: expected " + std::to_string(beta_.size() - 1) +
                             " features, got " + std::to_string(features.size()));
    double v = beta_[0];
    for (std::size_t j = 0; j + 1 < beta_.size(); ++j) v += beta_[j + 1] * features[j];
    return v;
}

nlohmann::json OlsModel::structure_json() const { return {{"beta", beta_}}; }

std::unique_ptr<OlsModel> OlsModel::from_structure(const nlohmann::json& j) {
    return std::make_unique<OlsModel>(j.at("beta").get<std::vector<double>>());
}

std::unique_ptr<OlsModel> fit_ols(const Matrix& X, const std::vector<double>& y) {
    Matrix design(X.rows, X.cols + 1);
    for (std::size_t i = 0; i < X.rows; ++i) {
        design.at(i, 0) = 1.0;
        for (std::size_t j = 0; j < X.cols; ++j) design.at(i, j + 1) = X.at(i, j);
    }
    auto m = std::make_unique<OlsModel>(solve_least_squares(design, y));
    m->n_train = X.rows;
    return m;
}

}  // namespace agb
