// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"
#include "adaret/data/batches.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

using compute::Tensor;

/// Binary cross-entropy of one round. scores [B, 1 + n]: column 0 is the
/// positive, the rest are negatives. Returns the mean over rows of
///   -log(sigmoid(pos)) - sum_j log(1 - sigmoid(neg_j))
/// with every log argument clamped to at least 1e-12.
Tensor round_loss(const Tensor& scores);

/// sum_t lambda^t * L_t, exponents starting at t = 1.
Tensor total_loss(std::span<const Tensor> per_round, double lambda);

/// Scoring ids per row: the target followed by its negatives. Sampled mode
/// draws `n_neg` uniform ids outside the row's history and target; full mode
/// uses every item except the target. `per_row` receives the row width.
std::vector<int> scoring_ids(const data::Batch& batch, std::size_t num_items, std::size_t n_neg, bool full_vocab,
                             Rng& rng, std::size_t& per_row);

}  // namespace engine
ADARET_END_NAMESPACE
