#include <doctest.h>

#include <cmath>
#include <vector>

#include "agb/learners.hpp"
#include "agb/rng.hpp"

using namespace agb;

namespace {

TrainingTable smallTable(std::size_t n, std::size_t p, std::uint64_t seed) {
    TrainingTable t;
    for (std::size_t j = 0; j < p; ++j) t.feature_names.push_back("f" + std::to_string(j));
    Rng rng(seed);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : row) v = rng.uniform(-1.0, 1.0);
        t.push_row(rng.uniform(-2.0, 2.0), row, "plot", 2005, 0.0, 0.0);
    }
    return t;
}

// Independent oracle: the same 2n-variable epsilon-SVR dual solved by
// projected gradient descent. The projection onto
// {0 <= x <= C, sum_i s_i x_i = 0} uses bisection on the equality
// multiplier. Deliberately shares no code with the SMO solver.
class ProjectedGradientDual {
public:
    ProjectedGradientDual(const TrainingTable& t, const SvrParams& p) : C_(p.c) {
        n_ = t.rows();
        const std::size_t m = 2 * n_;
        q_.assign(m * m, 0.0);
        pvec_.resize(m);
        sign_.resize(m);
        for (std::size_t i = 0; i < n_; ++i) {
            sign_[i] = 1.0;
            sign_[n_ + i] = -1.0;
            pvec_[i] = p.epsilon - t.response[i];
            pvec_[n_ + i] = p.epsilon + t.response[i];
        }
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                double s = 0.0;
                const auto ra = t.row(a % n_), rb = t.row(b % n_);
                for (std::size_t k = 0; k < ra.size(); ++k) {
                    const double d = ra[k] - rb[k];
                    s += d * d;
                }
                q_[a * m + b] = sign_[a] * sign_[b] * std::exp(-p.sigma * std::sqrt(s));
            }
    }

    double solve(int iters = 400000) {
        const std::size_t m = 2 * n_;
        std::vector<double> x(m, 0.0), grad(m), step(m);
        // Lipschitz bound: max row sum of |Q|
        double L = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < m; ++b) s += std::abs(q_[a * m + b]);
            L = std::max(L, s);
        }
        const double eta = 1.0 / L;
        for (int it = 0; it < iters; ++it) {
            for (std::size_t a = 0; a < m; ++a) {
                double g = pvec_[a];
                for (std::size_t b = 0; b < m; ++b) g += q_[a * m + b] * x[b];
                grad[a] = g;
            }
            for (std::size_t a = 0; a < m; ++a) step[a] = x[a] - eta * grad[a];
            project(step);
            double move = 0.0;
            for (std::size_t a = 0; a < m; ++a) {
                move = std::max(move, std::abs(step[a] - x[a]));
                x[a] = step[a];
            }
            if (move < 1e-12) break;
        }
        double obj = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            double qx = 0.0;
            for (std::size_t b = 0; b < m; ++b) qx += q_[a * m + b] * x[b];
            obj += 0.5 * x[a] * qx + pvec_[a] * x[a];
        }
        return obj;
    }

private:
    void project(std::vector<double>& v) const {
        // find lambda with sum_i s_i * clip(v_i - lambda * s_i) = 0
        double lo = -1e9, hi = 1e9;
        for (int it = 0; it < 200; ++it) {
            const double mid = (lo + hi) / 2.0;
            double s = 0.0;
            for (std::size_t a = 0; a < v.size(); ++a)
                s += sign_[a] * std::clamp(v[a] - mid * sign_[a], 0.0, C_);
            if (s > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double lambda = (lo + hi) / 2.0;
        for (std::size_t a = 0; a < v.size(); ++a)
            v[a] = std::clamp(v[a] - lambda * sign_[a], 0.0, C_);
    }

    std::size_t n_;
    double C_;
    std::vector<double> q_, pvec_, sign_;
};

}  // namespace

TEST_CASE("svr: a single training point is fit by the bias alone") {
    TrainingTable t;
    t.feature_names = {"f0"};
    t.push_row(5.5, std::vector<double>{1.0}, "plot", 2005, 0.0, 0.0);
    SvrParams p;
    p.sigma = 1.0;
    p.c = 10.0;
    p.epsilon = 0.1;
    const auto m = fit_svr(t, p);
    CHECK(m->dual_coef.empty());  // zero dual weight
    CHECK(m->bias == doctest::Approx(5.5).epsilon(1e-9));
    CHECK(m->predict_row(std::vector<double>{-3.0}) == doctest::Approx(5.5));
}

TEST_CASE("svr: dual objective matches the projected-gradient oracle") {
    for (std::uint64_t seed : {41ULL, 42ULL, 43ULL}) {
        const auto t = smallTable(6 + seed % 4, 2, seed);
        SvrParams p;
        p.sigma = 0.8;
        p.c = 5.0;
        p.epsilon = 0.05;
        p.tolerance = 1e-6;
        const auto m = fit_svr(t, p);
        REQUIRE(m->converged);

        ProjectedGradientDual oracle(t, p);
        const double oracleObj = oracle.solve();
        const double scale = std::max({1.0, std::abs(oracleObj), std::abs(m->dual_objective)});
        CHECK(std::abs(m->dual_objective - oracleObj) / scale < 1e-4);
        // SMO should never land above the oracle by more than the gap
        CHECK(m->dual_objective <= oracleObj + 1e-4 * scale);
    }
}

TEST_CASE("svr: KKT conditions at the solution") {
    const auto t = smallTable(12, 3, 51);
    SvrParams p;
    p.sigma = 0.6;
    p.c = 4.0;
    p.epsilon = 0.15;
    p.tolerance = 1e-6;
    const auto m = fit_svr(t, p);
    REQUIRE(m->converged);
    CHECK(m->kkt_violation < p.tolerance);

    // box bounds and sum constraint
    double sum = 0.0;
    for (double c : m->dual_coef) {
        CHECK(c >= -p.c - 1e-9);
        CHECK(c <= p.c + 1e-9);
        sum += c;
    }
    CHECK(std::abs(sum) < 1e-6);

    // raw duals: 0 <= alpha, alpha* <= C and complementarity alpha*alpha~0
    const std::size_t n = t.rows();
    REQUIRE(m->raw_alpha.size() == 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double up = m->raw_alpha[i];
        const double dn = m->raw_alpha[n + i];
        CHECK(up >= -1e-12);
        CHECK(dn >= -1e-12);
        CHECK(up <= p.c + 1e-12);
        CHECK(dn <= p.c + 1e-12);
        CHECK(up * dn <= p.tolerance * p.c);
    }

    // strictly inside the epsilon tube -> zero dual coefficient
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double err = std::abs(m->predict_row(t.row(i)) - t.response[i]);
        if (err < p.epsilon - 1e-3) {
            bool isSupport = false;
            for (std::size_t s = 0; s < m->support.size(); ++s) {
                bool same = true;
                for (std::size_t k = 0; k < t.width(); ++k)
                    if (m->support[s][k] != t.row(i)[k]) same = false;
                if (same && std::abs(m->dual_coef[s]) > 1e-6) isSupport = true;
            }
            CHECK(!isSupport);
        }
    }
}

TEST_CASE("svr: row cap and determinism") {
    const auto t = smallTable(20, 2, 61);
    SvrParams p;
    p.sigma = 0.5;
    p.c = 2.0;
    p.epsilon = 0.1;
    p.row_cap = 10;
    CHECK_THROWS_AS(fit_svr(t, p), TooManyRows);

    p.row_cap = 4000;
    const auto a = fit_svr(t, p);
    const auto b = fit_svr(t, p);
    CHECK(a->to_json() == b->to_json());
}

TEST_CASE("svr: serialization round trip") {
    const auto t = smallTable(15, 2, 71);
    SvrParams p;
    p.sigma = 0.7;
    p.c = 3.0;
    p.epsilon = 0.05;
    const auto m = fit_svr(t, p);
    const auto j = m->to_json();
    const auto back = model_from_json(j);
    for (std::size_t i = 0; i < t.rows(); ++i)
        CHECK(back->predict_row(t.row(i)) == m->predict_row(t.row(i)));
}
