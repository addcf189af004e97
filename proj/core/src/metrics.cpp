#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agb/metrics.hpp"
#include "agb/rng.hpp"

namespace agb {

namespace {

struct Core {
    double rmse, mae, me, r2, refMean;
};

Core core_metrics(const std::vector<double>& ref, const std::vector<double>& pred) {
    const std::size_t n = ref.size();
    double sum = 0.0;
    for (double y : ref) sum += y;
    const double mean = sum / static_cast<double>(n);

    double sse = 0.0, sae = 0.0, se = 0.0, sstot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ref[i] - pred[i];
        sse += e * e;
        sae += std::abs(e);
        se += e;
        const double d = ref[i] - mean;
        sstot += d * d;
    }
    Core c;
    c.rmse = std::sqrt(sse / static_cast<double>(n));
    c.mae = sae / static_cast<double>(n);
    c.me = se / static_cast<double>(n);
    c.r2 = sstot > 0.0 ? 1.0 - sse / sstot : std::numeric_limits<double>::quiet_NaN();
    c.refMean = mean;
    return c;
}

}  // namespace

MetricSet point_metrics(const EvalPairs& p) {
    if (p.n() == 0) throw DegenerateInput("metrics: empty pair set");
    if (p.pred.size() != p.ref.size()) throw DataError("metrics: length mismatch");
    const Core c = core_metrics(p.ref, p.pred);
    if (c.refMean == 0.0)
        throw DegenerateInput("metrics: mean reference is zero, percent metrics undefined");

    MetricSet m;
    m.rmse = c.rmse;
    m.mae = c.mae;
    m.me = c.me;
    m.r2 = c.r2;
    m.prmse = 100.0 * c.rmse / c.refMean;
    m.pmae = 100.0 * c.mae / c.refMean;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.se_rmse = m.se_r2 = m.se_mae = m.se_me = nan;
    return m;
}

MetricSet metrics(const EvalPairs& p, int boot_iters, std::uint64_t seed) {
    const std::size_t n = p.n();
    if (n < 2) throw DegenerateInput("metrics: standard errors need n >= 2");
    MetricSet m = point_metrics(p);

    // SE of MAE and ME: sample standard deviation of the per-pair errors
    // (implemented exactly as printed, without the 1/sqrt(n) factor).
    {
        double sumAbs = 0.0, sumSgn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = p.ref[i] - p.pred[i];
            sumAbs += std::abs(e);
            sumSgn += e;
        }
        const double meanAbs = sumAbs / static_cast<double>(n);
        const double meanSgn = sumSgn / static_cast<double>(n);
        double ssAbs = 0.0, ssSgn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = p.ref[i] - p.pred[i];
            ssAbs += (std::abs(e) - meanAbs) * (std::abs(e) - meanAbs);
            ssSgn += (e - meanSgn) * (e - meanSgn);
        }
        m.se_mae = std::sqrt(ssAbs / static_cast<double>(n - 1));
        m.se_me = std::sqrt(ssSgn / static_cast<double>(n - 1));
    }

    if (boot_iters > 0) {
        // Canonical order makes the bootstrap a function of the pair
        // multiset, not of the caller's ordering.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (p.ref[a] != p.ref[b]) return p.ref[a] < p.ref[b];
            return p.pred[a] < p.pred[b];
        });

        std::vector<double> rmses(boot_iters), r2s(boot_iters);
        std::vector<double> bref(n), bpred(n);
        for (int b = 0; b < boot_iters; ++b) {
            Rng rng(derive_seed(seed, "boot", static_cast<std::uint64_t>(b)));
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t k = order[rng.below(n)];
                bref[i] = p.ref[k];
                bpred[i] = p.pred[k];
            }
            const Core c = core_metrics(bref, bpred);
            rmses[b] = c.rmse;
            r2s[b] = c.r2;
        }
        auto boot_se = [&](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            const double mean = s / v.size();
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double var = ss / (v.size() - 1);
            return std::sqrt(var / static_cast<double>(n));
        };
        m.se_rmse = boot_se(rmses);
        m.se_r2 = boot_se(r2s);
    }
    return m;
}

GmfrLine gmfr(const EvalPairs& p) {
    const std::size_t n = p.n();
    if (n < 2) throw DegenerateInput("gmfr: need n >= 2");
    double mr = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mr += p.ref[i];
        mp += p.pred[i];
    }
    mr /= static_cast<double>(n);
    mp /= static_cast<double>(n);

    double srr = 0.0, spp = 0.0, srp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = p.ref[i] - mr;
        const double dp = p.pred[i] - mp;
        srr += dr * dr;
        spp += dp * dp;
        srp += dr * dp;
    }
    if (srr == 0.0 || spp == 0.0)
        throw DegenerateInput("gmfr: zero variance in reference or prediction");

    GmfrLine g;
    g.slope = (srp < 0.0 ? -1.0 : 1.0) * std::sqrt(srr / spp);
    g.intercept = mr - g.slope * mp;
    return g;
}

}  // namespace agb
