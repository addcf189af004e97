#include <algorithm>
#include <numeric>

#include "agb/learners.hpp"
#include "agb/rng.hpp"
#include "agb/tree_grow.hpp"

namespace agb {

nlohmann::json RegressionTree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes)
        arr.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return arr;
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
    RegressionTree t;
    t.nodes.reserve(j.size());
    for (const auto& e : j) {
        TreeNode n;
        n.feature = e.at(0).get<std::int32_t>();
        n.threshold = e.at(1).get<double>();
        n.left = e.at(2).get<std::int32_t>();
        n.right = e.at(3).get<std::int32_t>();
        n.value = e.at(4).get<double>();
        t.nodes.push_back(n);
    }
    if (t.nodes.empty()) throw DataError("tree: empty node list");
    return t;
}

namespace {

struct Pending {
    std::int32_t node;
    std::size_t lo;
    std::size_t hi;  // rows[lo..hi)
};

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // sum of child s^2/n terms
};

}  // namespace

RegressionTree grow_cart(const TrainingTable& t, std::vector<std::size_t> rows,
                         const CartParams& p, Rng& rng) {
    RegressionTree tree;
    const std::size_t nf = t.width();

    std::vector<std::size_t> featPool(nf);
    std::iota(featPool.begin(), featPool.end(), 0);
    std::vector<int> candidates;
    // (value, response) pairs of the current node, sorted per feature.
    std::vector<std::pair<double, double>> vals;

    tree.nodes.push_back({});
    std::vector<Pending> queue{{0, 0, rows.size()}};

    // Nodes are processed in creation order so the RNG is consumed in a
    // reproducible sequence.
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const Pending cur = queue[qi];
        const std::size_t n = cur.hi - cur.lo;

        double sum = 0.0;
        for (std::size_t k = cur.lo; k < cur.hi; ++k) sum += t.response[rows[k]];
        const double mean = sum / static_cast<double>(n);

        auto make_leaf = [&] {
            tree.nodes[cur.node].feature = -1;
            tree.nodes[cur.node].value = mean;
        };

        if (n < 2 || n <= static_cast<std::size_t>(p.min_node_size)) {
            make_leaf();
            continue;
        }

        // mtry candidate features, evaluated in ascending index order so
        // equal-score ties resolve to the lowest feature.
        candidates.clear();
        for (int k = 0; k < p.mtry; ++k) {
            const std::size_t pick =
                k + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(nf - k)));
            std::swap(featPool[k], featPool[pick]);
            candidates.push_back(static_cast<int>(featPool[k]));
        }
        std::sort(candidates.begin(), candidates.end());

        // Strictly-better comparison: equal scores keep the earlier
        // candidate, i.e. the lowest feature index, then lowest threshold.
        const auto better = [](double a, double b) {
            return a > b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        const double parentScore = sum * sum / static_cast<double>(n);
        BestSplit best;
        for (int f : candidates) {
            vals.clear();
            vals.reserve(n);
            for (std::size_t k = cur.lo; k < cur.hi; ++k)
                vals.emplace_back(t.row(rows[k])[f], t.response[rows[k]]);
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double sl = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                sl += vals[k].second;
                if (vals[k].first == vals[k + 1].first) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = static_cast<double>(n - k - 1);
                const double sr = sum - sl;
                const double score = sl * sl / nl + sr * sr / nr;
                if (better(score, best.found ? best.score : parentScore)) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = vals[k].first + (vals[k + 1].first - vals[k].first) / 2.0;
                    best.score = score;
                }
            }
        }

        if (!best.found) {
            make_leaf();
            continue;
        }

        // Stable partition of the node's row range.
        std::vector<std::size_t> leftRows, rightRows;
        for (std::size_t k = cur.lo; k < cur.hi; ++k) {
            if (t.row(rows[k])[best.feature] <= best.threshold)
                leftRows.push_back(rows[k]);
            else
                rightRows.push_back(rows[k]);
        }
        std::copy(leftRows.begin(), leftRows.end(), rows.begin() + cur.lo);
        std::copy(rightRows.begin(), rightRows.end(), rows.begin() + cur.lo + leftRows.size());

        const auto li = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({});
        const auto ri = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[cur.node].feature = best.feature;
        tree.nodes[cur.node].threshold = best.threshold;
        tree.nodes[cur.node].left = li;
        tree.nodes[cur.node].right = ri;
        queue.push_back({li, cur.lo, cur.lo + leftRows.size()});
        queue.push_back({ri, cur.lo + leftRows.size(), cur.hi});
    }
    return tree;
}

}  // namespace agb
