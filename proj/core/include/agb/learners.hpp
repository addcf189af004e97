#pragma once

#include "agb/linalg.hpp"
#include "agb/model.hpp"

namespace agb {

// ---------------------------------------------------------------------------
// Ordinary least squares
// ---------------------------------------------------------------------------

class OlsModel final : public Model {
public:
    /// beta[0] is the intercept.
    explicit OlsModel(std::vector<double> beta) : beta_(std::move(beta)) {}

    std::string kind() const override { return "ols"; }
    double predict_row(std::span<const double> features) const override;
    nlohmann::json structure_json() const override;

    const std::vector<double>& beta() const { return beta_; }

    static std::unique_ptr<OlsModel> from_structure(const nlohmann::json& j);

private:
    std::vector<double> beta_;
};

/// Least-squares fit of y on X plus an implicit leading intercept column
/// (design column 0). Throws RankDeficient with the offending design
/// column index.
std::unique_ptr<OlsModel> fit_ols(const Matrix& X, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Regression trees (shared by the random forest)
// ---------------------------------------------------------------------------

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // goes left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // leaf mean
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const {
        std::int32_t i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }

    nlohmann::json to_json() const;
    static RegressionTree from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct RfParams {
    int num_trees = 500;
    int mtry = 0;  // 0 = floor(sqrt(p)) at fit time
    int min_node_size = 5;
    double sample_fraction = 1.0;
    bool replace = true;
    std::uint64_t seed = 0;

    void validate(std::size_t n_features) const;
    nlohmann::json to_json() const;
    static RfParams from_json(const nlohmann::json& j);
};

class RfModel final : public Model {
public:
    std::string kind() const override { return "rf"; }
    double predict_row(std::span<const double> x) const override;
    nlohmann::json structure_json() const override;

    std::vector<RegressionTree> trees;

    static std::unique_ptr<RfModel> from_structure(const nlohmann::json& j);
};

/// Bagged CART variance-reduction trees; each split considers mtry
/// uniformly drawn candidate features. Split ties break to the lowest
/// feature index, then the lowest threshold.
std::unique_ptr<RfModel> fit_rf(const TrainingTable& train, const RfParams& p,
                                int threads = 1);

// ---------------------------------------------------------------------------
// Stochastic gradient boosting (leaf-wise histogram trees)
// ---------------------------------------------------------------------------

struct GbmParams {
    double learning_rate = 0.1;
    int num_rounds = 100;
    int num_leaves = 31;
    int max_depth = 24;
    bool extra_trees = false;
    int min_data_in_leaf = 20;
    double bagging_fraction = 1.0;
    int bagging_freq = 0;  // 0 = never resample
    double feature_fraction = 1.0;
    int min_data_in_bin = 3;
    double l1 = 0.0;
    double l2 = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static GbmParams from_json(const nlohmann::json& j);
};

class GbmModel final : public Model {
public:
    std::string kind() const override { return "gbm"; }
    double predict_row(std::span<const double> x) const override;
    nlohmann::json structure_json() const override;

    double f0 = 0.0;
    std::vector<RegressionTree> trees;  // leaf values already shrunk

    /// Squared-error training loss after every round (loss_curve[0] is the
    /// loss of the constant F0 model). Kept for diagnostics.
    std::vector<double> loss_curve;

    static std::unique_ptr<GbmModel> from_structure(const nlohmann::json& j);
};

std::unique_ptr<GbmModel> fit_gbm(const TrainingTable& train, const GbmParams& p);

// ---------------------------------------------------------------------------
// Epsilon-SVR with Laplacian kernel, SMO dual solver
// ---------------------------------------------------------------------------

struct SvrParams {
    double sigma = 0.0019531;  // k(u,v) = exp(-sigma * ||u - v||_2)
    double c = 36.0;
    double epsilon = 0.0441942;
    double tolerance = 1e-3;
    long max_iterations = 2000000;
    std::size_t row_cap = 4000;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static SvrParams from_json(const nlohmann::json& j);
};

class SvrModel final : public Model {
public:
    std::string kind() const override { return "svr"; }
    double predict_row(std::span<const double> x) const override;
    nlohmann::json structure_json() const override;

    double sigma = 0.0;
    double bias = 0.0;
    std::vector<double> dual_coef;           // alpha_i - alpha_i^*, nonzero rows only
    std::vector<std::vector<double>> support; // matching feature vectors

    // Solver diagnostics.
    bool converged = false;
    double kkt_violation = 0.0;   // final maximal-violating-pair gap
    double dual_objective = 0.0;  // minimized dual value
    long iterations = 0;
    // Raw dual variables (alpha_1..n then alpha*_1..n); diagnostics only,
    // not serialized.
    std::vector<double> raw_alpha;

    static std::unique_ptr<SvrModel> from_structure(const nlohmann::json& j);
};

/// Solves the epsilon-insensitive dual by SMO-style pairwise updates until
/// the maximal KKT violation drops below `tolerance`. Throws TooManyRows
/// above the row cap; throws NotConverged at the iteration limit unless
/// `throw_on_nonconverged` is false, in which case the best iterate is
/// returned with converged == false.
std::unique_ptr<SvrModel> fit_svr(const TrainingTable& train, const SvrParams& p,
                                  bool throw_on_nonconverged = true);

}  // namespace agb
