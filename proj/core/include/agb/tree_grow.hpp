#pragma once

#include <vector>

#include "agb/learners.hpp"
#include "agb/rng.hpp"

namespace agb {

struct CartParams {
    int mtry = 1;
    int min_node_size = 1;  // nodes of this size or smaller become leaves
};

/// Grows one CART variance-reduction tree on the given rows (duplicates
/// allowed, as produced by bootstrap sampling). The RNG drives candidate
/// feature draws and is consumed in node-creation order.
RegressionTree grow_cart(const TrainingTable& t, std::vector<std::size_t> rows,
                         const CartParams& p, Rng& rng);

}  // namespace agb
