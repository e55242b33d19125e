// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "adaret/data/batches.hpp"
#include "adaret/engine/model.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

/// Ranked items for one user, round-major and score-descending within each
/// round; `rounds[i]` is the 1-based round that produced `items[i]`.
struct RetrievalResult {
    std::vector<int> items;
    std::vector<int> rounds;
};

struct RetrievalSpec {
    std::size_t k = 50;
    int rounds = 1;
    config::AdapterToggles toggles;
};

/// Multi-round top-K for every row of an evaluation batch. Each round takes
/// K/T new items, skipping padding, the row's history and earlier picks; the
/// best min(k_ctx, K/T) of them join the item context and the round's user
/// vector joins the user context.
std::vector<RetrievalResult> retrieve_batch(const Model& model, const data::Batch& batch, const RetrievalSpec& spec);

/// Single-user convenience wrapper; `exclude` is typically the history.
RetrievalResult retrieve(const Model& model, std::span<const int> sequence, std::span<const int> exclude,
                         const RetrievalSpec& spec);

}  // namespace engine
ADARET_END_NAMESPACE
