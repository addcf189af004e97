#include <algorithm>
#include <cmath>
#include <numeric>

#include "agb/learners.hpp"
#include "agb/rng.hpp"

namespace agb {

void GbmParams::validate() const {
    if (learning_rate <= 0.0) throw InvalidParams("gbm: learning_rate must be > 0");
    if (num_rounds < 1) throw InvalidParams("gbm: num_rounds must be >= 1");
    if (num_leaves < 1) throw InvalidParams("gbm: num_leaves must be >= 1");
    if (max_depth < 1) throw InvalidParams("gbm: max_depth must be >= 1");
    if (min_data_in_leaf < 1) throw InvalidParams("gbm: min_data_in_leaf must be >= 1");
    if (min_data_in_bin < 1) throw InvalidParams("gbm: min_data_in_bin must be >= 1");
    if (bagging_fraction <= 0.0 || bagging_fraction > 1.0)
        throw InvalidParams("gbm: bagging_fraction must be in (0,1]");
    if (feature_fraction <= 0.0 || feature_fraction > 1.0)
        throw InvalidParams("gbm: feature_fraction must be in (0,1]");
    if (bagging_freq < 0) throw InvalidParams("gbm: bagging_freq must be >= 0");
    if (l1 < 0.0 || l2 < 0.0) throw InvalidParams("gbm: l1/l2 must be >= 0");
}

nlohmann::json GbmParams::to_json() const {
    return {{"learning_rate", learning_rate},
            {"num_rounds", num_rounds},
            {"num_leaves", num_leaves},
            {"max_depth", max_depth},
            {"extra_trees", extra_trees},
            {"min_data_in_leaf", min_data_in_leaf},
            {"bagging_fraction", bagging_fraction},
            {"bagging_freq", bagging_freq},
            {"feature_fraction", feature_fraction},
            {"min_data_in_bin", min_data_in_bin},
            {"l1", l1},
            {"l2", l2},
            {"seed", seed}};
}

GbmParams GbmParams::from_json(const nlohmann::json& j) {
    GbmParams p;
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.num_rounds = j.value("num_rounds", p.num_rounds);
    p.num_leaves = j.value("num_leaves", p.num_leaves);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.extra_trees = j.value("extra_trees", p.extra_trees);
    p.min_data_in_leaf = j.value("min_data_in_leaf", p.min_data_in_leaf);
    p.bagging_fraction = j.value("bagging_fraction", p.bagging_fraction);
    p.bagging_freq = j.value("bagging_freq", p.bagging_freq);
    p.feature_fraction = j.value("feature_fraction", p.feature_fraction);
    p.min_data_in_bin = j.value("min_data_in_bin", p.min_data_in_bin);
    p.l1 = j.value("l1", p.l1);
    p.l2 = j.value("l2", p.l2);
    p.seed = j.value("seed", p.seed);
    return p;
}

double GbmModel::predict_row(std::span<const double> x) const {
    double v = f0;
    for (const auto& t : trees) v += t.predict(x);
    return v;
}

nlohmann::json GbmModel::structure_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return {{"f0", f0}, {"trees", arr}};
}

std::unique_ptr<GbmModel> GbmModel::from_structure(const nlohmann::json& j) {
    auto m = std::make_unique<GbmModel>();
    m->f0 = j.at("f0").get<double>();
    for (const auto& jt : j.at("trees")) m->trees.push_back(RegressionTree::from_json(jt));
    return m;
}

namespace {

constexpr int kMaxBins = 255;

// Equal-frequency bins merged so every bin holds >= min_data_in_bin
// samples where distinct values allow. upper[b] is the inclusive upper
// boundary; the last entry is +inf.
struct BinMapper {
    std::vector<double> upper;

    int nbins() const { return static_cast<int>(upper.size()); }

    int bin_of(double v) const {
        int lo = 0, hi = nbins() - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (v <= upper[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }
};

BinMapper build_bins(std::vector<double> values, int min_data_in_bin) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const auto target = static_cast<std::size_t>(std::max<std::size_t>(
        min_data_in_bin, (n + kMaxBins - 1) / kMaxBins));

    BinMapper bm;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ++count;
        const bool lastValue = i + 1 == n;
        const bool boundary = !lastValue && values[i] != values[i + 1];
        if (!lastValue && boundary && count >= target) {
            bm.upper.push_back(values[i] + (values[i + 1] - values[i]) / 2.0);
            count = 0;
        }
    }
    bm.upper.push_back(std::numeric_limits<double>::infinity());
    return bm;
}

struct Leaf {
    std::vector<std::uint32_t> rows;  // indices into the bagged row set
    double sum = 0.0;                 // residual sum
    int depth = 0;
    std::int32_t node = -1;           // index in the growing tree
    // best candidate split
    bool can_split = false;
    double gain = 0.0;
    int feature = -1;
    int bin = -1;  // split boundary after this bin
};

double thresholded(double s, double l1) {
    const double t = std::abs(s) - l1;
    if (t <= 0.0) return 0.0;
    return s >= 0.0 ? t : -t;
}

}  // namespace

std::unique_ptr<GbmModel> fit_gbm(const TrainingTable& train, const GbmParams& p) {
    p.validate();
    const std::size_t n = train.rows();
    const std::size_t nf = train.width();
    if (n == 0) throw DataError("gbm: empty training table");

    // Pre-bin every feature once.
    std::vector<BinMapper> bins(nf);
    std::vector<std::uint8_t> binIndex(n * nf);
    {
        std::vector<double> col(n);
        for (std::size_t f = 0; f < nf; ++f) {
            for (std::size_t i = 0; i < n; ++i) col[i] = train.row(i)[f];
            bins[f] = build_bins(col, p.min_data_in_bin);
            for (std::size_t i = 0; i < n; ++i)
                binIndex[i * nf + f] = static_cast<std::uint8_t>(bins[f].bin_of(col[i]));
        }
    }

    auto model = std::make_unique<GbmModel>();
    model->params = p.to_json();
    model->schema_hash = train.schema_hash();
    model->seed = p.seed;
    model->n_train = n;
    model->f0 = std::accumulate(train.response.begin(), train.response.end(), 0.0) /
                static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = train.response[i] - model->f0;

    auto loss = [&] {
        double s = 0.0;
        for (double r : residual) s += r * r;
        return s / static_cast<double>(n);
    };
    model->loss_curve.push_back(loss());

    const auto leafScore = [&](double s, double h) {
        const double t = thresholded(s, p.l1);
        return t * t / (h + p.l2);
    };
    const auto better = [](double a, double b) {
        return a > b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };

    const bool bagging = p.bagging_fraction < 1.0 && p.bagging_freq > 0;
    std::vector<std::uint32_t> bag(n);
    std::iota(bag.begin(), bag.end(), 0u);

    std::vector<int> treeFeatures;
    std::vector<double> histSum(kMaxBins);
    std::vector<std::uint32_t> histCount(kMaxBins);

    for (int round = 0; round < p.num_rounds; ++round) {
        if (bagging && round % p.bagging_freq == 0) {
            Rng rng(derive_seed(p.seed, "bag", static_cast<std::uint64_t>(round)));
            const auto m = static_cast<std::size_t>(
                std::ceil(static_cast<double>(n) * p.bagging_fraction));
            std::vector<std::uint32_t> pool(n);
            std::iota(pool.begin(), pool.end(), 0u);
            for (std::size_t k = 0; k < m; ++k)
                std::swap(pool[k], pool[k + rng.below(n - k)]);
            bag.assign(pool.begin(), pool.begin() + m);
            std::sort(bag.begin(), bag.end());
        }

        // Feature subset for this tree, ascending for deterministic scans.
        treeFeatures.clear();
        if (p.feature_fraction < 1.0) {
            Rng rng(derive_seed(p.seed, "feat", static_cast<std::uint64_t>(round)));
            const auto m = static_cast<std::size_t>(
                std::ceil(static_cast<double>(nf) * p.feature_fraction));
            std::vector<std::uint32_t> pool(nf);
            std::iota(pool.begin(), pool.end(), 0u);
            for (std::size_t k = 0; k < m; ++k)
                std::swap(pool[k], pool[k + rng.below(nf - k)]);
            for (std::size_t k = 0; k < m; ++k) treeFeatures.push_back(static_cast<int>(pool[k]));
            std::sort(treeFeatures.begin(), treeFeatures.end());
        } else {
            for (std::size_t f = 0; f < nf; ++f) treeFeatures.push_back(static_cast<int>(f));
        }

        Rng splitRng(derive_seed(p.seed, "split", static_cast<std::uint64_t>(round)));

        RegressionTree tree;
        tree.nodes.push_back({});
        std::vector<Leaf> leaves;
        {
            Leaf root;
            root.rows = bag;
            for (std::uint32_t r : root.rows) root.sum += residual[r];
            root.node = 0;
            leaves.push_back(std::move(root));
        }

        // Finds the best (or, with extra_trees, one random) boundary per
        // candidate feature. Consumes splitRng in leaf-creation order.
        auto find_best = [&](Leaf& leaf) {
            leaf.can_split = false;
            if (leaf.depth >= p.max_depth) return;
            if (leaf.rows.size() < 2 * static_cast<std::size_t>(p.min_data_in_leaf)) return;
            const double parent = leafScore(leaf.sum, static_cast<double>(leaf.rows.size()));
            for (int f : treeFeatures) {
                const int nb = bins[f].nbins();
                if (nb < 2) continue;
                std::fill(histSum.begin(), histSum.begin() + nb, 0.0);
                std::fill(histCount.begin(), histCount.begin() + nb, 0u);
                for (std::uint32_t r : leaf.rows) {
                    const int b = binIndex[static_cast<std::size_t>(r) * nf + f];
                    histSum[b] += residual[r];
                    histCount[b] += 1;
                }
                int loBin = 0, hiBin = nb - 2;
                if (p.extra_trees) {
                    // one random threshold per candidate feature
                    loBin = hiBin = static_cast<int>(splitRng.below(static_cast<std::uint64_t>(nb - 1)));
                }
                double sl = 0.0;
                std::uint32_t cl = 0;
                for (int b = 0; b <= hiBin; ++b) {
                    sl += histSum[b];
                    cl += histCount[b];
                    if (b < loBin) continue;
                    const auto cr = static_cast<std::uint32_t>(leaf.rows.size()) - cl;
                    if (cl < static_cast<std::uint32_t>(p.min_data_in_leaf) ||
                        cr < static_cast<std::uint32_t>(p.min_data_in_leaf))
                        continue;
                    const double gain =
                        leafScore(sl, cl) + leafScore(leaf.sum - sl, cr) - parent;
                    if (gain > 1e-12 &&
                        (!leaf.can_split || better(gain, leaf.gain))) {
                        leaf.can_split = true;
                        leaf.gain = gain;
                        leaf.feature = f;
                        leaf.bin = b;
                    }
                }
            }
        };

        find_best(leaves[0]);

        while (static_cast<int>(leaves.size()) < p.num_leaves) {
            // split the leaf with the largest gain; ties keep the oldest
            int bestLeaf = -1;
            for (std::size_t li = 0; li < leaves.size(); ++li)
                if (leaves[li].can_split &&
                    (bestLeaf < 0 || better(leaves[li].gain, leaves[bestLeaf].gain)))
                    bestLeaf = static_cast<int>(li);
            if (bestLeaf < 0) break;

            Leaf& parent = leaves[bestLeaf];
            const int f = parent.feature;
            const int b = parent.bin;
            Leaf left, right;
            left.depth = right.depth = parent.depth + 1;
            for (std::uint32_t r : parent.rows) {
                if (binIndex[static_cast<std::size_t>(r) * nf + f] <= b) {
                    left.rows.push_back(r);
                    left.sum += residual[r];
                } else {
                    right.rows.push_back(r);
                }
            }
            right.sum = parent.sum - left.sum;

            const auto li = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.push_back({});
            const auto ri = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.push_back({});
            TreeNode& pn = tree.nodes[parent.node];
            pn.feature = f;
            pn.threshold = bins[f].upper[b];
            pn.left = li;
            pn.right = ri;
            left.node = li;
            right.node = ri;

            // replace parent with left, append right
            leaves[bestLeaf] = std::move(left);
            leaves.push_back(std::move(right));
            find_best(leaves[bestLeaf]);
            find_best(leaves.back());
        }

        // Shrunk leaf values with L1 soft-threshold and L2 shrinkage.
        for (const Leaf& leaf : leaves) {
            tree.nodes[leaf.node].value =
                p.learning_rate * thresholded(leaf.sum, p.l1) /
                (static_cast<double>(leaf.rows.size()) + p.l2);
        }

        for (std::size_t i = 0; i < n; ++i) residual[i] -= tree.predict(train.row(i));
        model->loss_curve.push_back(loss());
        model->trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace agb
