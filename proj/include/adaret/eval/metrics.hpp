// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace adaret::metrics {

/// 1-based position of `target` within the first `k` entries, or 0 if absent.
std::size_t rank_of(std::span<const int> ranked, int target, long k);

/// Fraction of users whose target is among the first k ranked items.
double hr_at_k(std::span<const std::vector<int>> ranked, std::span<const int> targets, long k);

/// Mean of 1/log2(rank + 1) over users with the target in the top k (else 0).
double ndcg_at_k(std::span<const std::vector<int>> ranked, std::span<const int> targets, long k);

}  // namespace adaret::metrics
