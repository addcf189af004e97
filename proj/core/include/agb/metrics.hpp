#pragma once

#include <cstdint>
#include <vector>

#include "agb/error.hpp"

namespace agb {

/// Parallel reference / prediction arrays (Mg ha^-1).
struct EvalPairs {
    std::vector<double> ref;   // y
    std::vector<double> pred;  // y-hat

    std::size_t n() const { return ref.size(); }
    void push(double y, double yhat) {
        ref.push_back(y);
        pred.push_back(yhat);
    }
};

struct MetricSet {
    double rmse = 0.0;
    double prmse = 0.0;  // 100 * rmse / mean(ref)
    double mae = 0.0;
    double pmae = 0.0;
    double me = 0.0;     // mean(ref - pred)
    double r2 = 0.0;     // 1 - SSres/SStot (NaN when SStot == 0)
    double se_rmse = 0.0;  // bootstrap, sqrt(Var_boot / n)
    double se_r2 = 0.0;    // bootstrap
    double se_mae = 0.0;   // sqrt(sum((e - mean e)^2) / (n - 1)), e = |y - yhat|
    double se_me = 0.0;    // same with signed errors
};

/// rmse/prmse/mae/pmae/me/r2 only; the SE fields are NaN.
MetricSet point_metrics(const EvalPairs& p);

/// Full metric set. The bootstrap resamples pairs with replacement over a
/// canonical ordering of the pair multiset, with one sub-seed per
/// iteration, so results are permutation- and thread-invariant.
/// Requires n >= 2 and mean(ref) != 0.
MetricSet metrics(const EvalPairs& p, int boot_iters = 1000, std::uint64_t seed = 0);

struct GmfrLine {
    double slope = 0.0;      // sign(corr) * sd(ref) / sd(pred)
    double intercept = 0.0;  // mean(ref) - slope * mean(pred)
};

/// Geometric mean functional relationship (reduced major axis) line.
/// Throws DegenerateInput when either standard deviation is zero.
GmfrLine gmfr(const EvalPairs& p);

}  // namespace agb
