#include <algorithm>
#include <cmath>
#include <limits>

#include "agb/learners.hpp"

namespace agb {

void SvrParams::validate() const {
    if (sigma <= 0.0) throw InvalidParams("svr: sigma must be > 0");
    if (c <= 0.0) throw InvalidParams("svr: C must be > 0");
    if (epsilon < 0.0) throw InvalidParams("svr: epsilon must be >= 0");
    if (tolerance <= 0.0) throw InvalidParams("svr: tolerance must be > 0");
    if (max_iterations < 1) throw InvalidParams("svr: max_iterations must be >= 1");
}

nlohmann::json SvrParams::to_json() const {
    return {{"sigma", sigma},         {"c", c},
            {"epsilon", epsilon},     {"tolerance", tolerance},
            {"max_iterations", max_iterations}, {"row_cap", row_cap},
            {"seed", seed}};
}

SvrParams SvrParams::from_json(const nlohmann::json& j) {
    SvrParams p;
    p.sigma = j.value("sigma", p.sigma);
    p.c = j.value("c", p.c);
    p.epsilon = j.value("epsilon", p.epsilon);
    p.tolerance = j.value("tolerance", p.tolerance);
    p.max_iterations = j.value("max_iterations", p.max_iterations);
    p.row_cap = j.value("row_cap", p.row_cap);
    p.seed = j.value("seed", p.seed);
    return p;
}

namespace {

double laplacian(std::span<const double> u, std::span<const double> v, double sigma) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - v[k];
        s += d * d;
    }
    return std::exp(-sigma * std::sqrt(s));
}

}  // namespace

double SvrModel::predict_row(std::span<const double> x) const {
    double v = bias;
    for (std::size_t i = 0; i < support.size(); ++i)
        v += dual_coef[i] * laplacian(support[i], x, sigma);
    return v;
}

nlohmann::json SvrModel::structure_json() const {
    return {{"sigma", sigma},
            {"bias", bias},
            {"dual_coef", dual_coef},
            {"support", support},
            {"converged", converged},
            {"kkt_violation", kkt_violation}};
}

std::unique_ptr<SvrModel> SvrModel::from_structure(const nlohmann::json& j) {
    auto m = std::make_unique<SvrModel>();
    m->sigma = j.at("sigma").get<double>();
    m->bias = j.at("bias").get<double>();
    m->dual_coef = j.at("dual_coef").get<std::vector<double>>();
    m->support = j.at("support").get<std::vector<std::vector<double>>>();
    m->converged = j.value("converged", true);
    m->kkt_violation = j.value("kkt_violation", 0.0);
    if (m->dual_coef.size() != m->support.size())
        throw DataError("svr: dual_coef/support size mismatch");
    return m;
}

// Epsilon-SVR dual in the 2n-variable form:
//   min 1/2 a^T Q a + p^T a,  0 <= a <= C,  sum_t ysign_t a_t = 0
// with a = (alpha, alpha*), ysign = (+1, -1), p = (eps - y, eps + y) and
// Q(t,u) = ysign_t ysign_u K(t mod n, u mod n). Pairs are selected by the
// maximal violating pair rule and optimized analytically.
std::unique_ptr<SvrModel> fit_svr(const TrainingTable& train, const SvrParams& p,
                                  bool throw_on_nonconverged) {
    p.validate();
    const std::size_t n = train.rows();
    if (n == 0) throw DataError("svr: empty training table");
    if (n > p.row_cap)
        throw TooManyRows("svr: " + std::to_string(n) + " rows exceeds the cap of " +
                          std::to_string(p.row_cap) +
                          " (raise row_cap explicitly to override)");

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        K[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = laplacian(train.row(i), train.row(j), p.sigma);
            K[i * n + j] = k;
            K[j * n + i] = k;
        }
    }

    const std::size_t m = 2 * n;
    std::vector<double> a(m, 0.0);
    std::vector<double> pvec(m);
    std::vector<double> grad(m);
    auto ysign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
    auto krow = [n](std::size_t t) { return t < n ? t : t - n; };
    for (std::size_t i = 0; i < n; ++i) {
        pvec[i] = p.epsilon - train.response[i];
        pvec[n + i] = p.epsilon + train.response[i];
    }
    grad = pvec;

    auto q = [&](std::size_t t, std::size_t u) {
        return ysign(t) * ysign(u) * K[krow(t) * n + krow(u)];
    };

    const double C = p.c;
    double gap = std::numeric_limits<double>::infinity();
    long iter = 0;
    bool converged = false;

    for (; iter < p.max_iterations; ++iter) {
        // maximal violating pair
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        std::ptrdiff_t i = -1, j = -1;
        for (std::size_t t = 0; t < m; ++t) {
            const double v = -ysign(t) * grad[t];
            const bool inUp = (ysign(t) > 0 && a[t] < C) || (ysign(t) < 0 && a[t] > 0);
            const bool inLow = (ysign(t) > 0 && a[t] > 0) || (ysign(t) < 0 && a[t] < C);
            if (inUp && v > up) {
                up = v;
                i = static_cast<std::ptrdiff_t>(t);
            }
            if (inLow && v < low) {
                low = v;
                j = static_cast<std::ptrdiff_t>(t);
            }
        }
        gap = up - low;
        if (i < 0 || j < 0 || gap < p.tolerance) {
            converged = true;
            break;
        }
        const auto ti = static_cast<std::size_t>(i);
        const auto tj = static_cast<std::size_t>(j);

        const double oldI = a[ti], oldJ = a[tj];
        if (ysign(ti) != ysign(tj)) {
            double quad = q(ti, ti) + q(tj, tj) + 2.0 * q(ti, tj);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (-grad[ti] - grad[tj]) / quad;
            const double diff = a[ti] - a[tj];
            a[ti] += delta;
            a[tj] += delta;
            if (diff > 0.0 && a[tj] < 0.0) {
                a[tj] = 0.0;
                a[ti] = diff;
            } else if (diff <= 0.0 && a[ti] < 0.0) {
                a[ti] = 0.0;
                a[tj] = -diff;
            }
            if (diff > 0.0 && a[ti] > C) {
                a[ti] = C;
                a[tj] = C - diff;
            } else if (diff <= 0.0 && a[tj] > C) {
                a[tj] = C;
                a[ti] = C + diff;
            }
        } else {
            double quad = q(ti, ti) + q(tj, tj) - 2.0 * q(ti, tj);
            if (quad <= 0.0) quad = 1e-12;
            const double delta = (grad[ti] - grad[tj]) / quad;
            const double sum = a[ti] + a[tj];
            a[ti] -= delta;
            a[tj] += delta;
            if (sum > C && a[ti] > C) {
                a[ti] = C;
                a[tj] = sum - C;
            } else if (sum <= C && a[tj] < 0.0) {
                a[tj] = 0.0;
                a[ti] = sum;
            }
            if (sum > C && a[tj] > C) {
                a[tj] = C;
                a[ti] = sum - C;
            } else if (sum <= C && a[ti] < 0.0) {
                a[ti] = 0.0;
                a[tj] = sum;
            }
        }

        const double dI = a[ti] - oldI;
        const double dJ = a[tj] - oldJ;
        for (std::size_t t = 0; t < m; ++t) grad[t] += q(t, ti) * dI + q(t, tj) * dJ;
    }

    // bias from free variables, else the midpoint of the KKT interval
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sumFree = 0.0;
    std::size_t nFree = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yG = ysign(t) * grad[t];
        if (a[t] >= C) {
            if (ysign(t) < 0)
                ub = std::min(ub, yG);
            else
                lb = std::max(lb, yG);
        } else if (a[t] <= 0.0) {
            if (ysign(t) > 0)
                ub = std::min(ub, yG);
            else
                lb = std::max(lb, yG);
        } else {
            ++nFree;
            sumFree += yG;
        }
    }
    const double rho = nFree > 0 ? sumFree / static_cast<double>(nFree) : (ub + lb) / 2.0;

    double dualObj = 0.0;
    for (std::size_t t = 0; t < m; ++t) dualObj += a[t] * (grad[t] + pvec[t]);
    dualObj /= 2.0;

    auto model = std::make_unique<SvrModel>();
    model->sigma = p.sigma;
    model->bias = -rho;
    model->params = p.to_json();
    model->schema_hash = train.schema_hash();
    model->seed = p.seed;
    model->n_train = n;
    model->converged = converged;
    model->kkt_violation = std::max(gap, 0.0);
    model->dual_objective = dualObj;
    model->iterations = iter;
    model->raw_alpha = a;
    for (std::size_t i = 0; i < n; ++i) {
        const double coef = a[i] - a[n + i];
        if (coef != 0.0) {
            model->dual_coef.push_back(coef);
            model->support.emplace_back(train.row(i).begin(), train.row(i).end());
        }
    }

    if (!converged && throw_on_nonconverged)
        throw NotConverged("svr: KKT violation " + std::to_string(gap) + " after " +
                           std::to_string(iter) + " iterations");
    return model;
}

}  // namespace agb
