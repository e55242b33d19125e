// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "adaret/data/batches.hpp"
#include "adaret/engine/model.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

/// Contexts gathered from the rounds already run for one batch.
struct RoundState {
    adapter::ItemContext items;
    adapter::UserContextStack users;
};

RoundState initial_state(std::size_t rows, std::size_t capacity);

struct RoundOutput {
    Tensor base;     // encoder output before the user adapter
    Tensor adapted;  // final user vector of the round
};

/// Embed -> item adapter -> encoder -> user adapter for one round.
RoundOutput forward_round(const Model& model, const data::Batch& batch, const RoundState& state,
                          const config::AdapterToggles& toggles, Mode mode, Rng& rng);

/// Ids of the k highest finite scores in a row laid out by item id (index 0
/// is padding). Ties go to the lower id. Throws when fewer than k ids are
/// selectable.
std::vector<int> top_k_ids(std::span<const Real> scores, std::size_t k);

/// Scores every item against f [B, d], excluding padding, each row's current
/// pool and optional extra ids, then appends the top k per row to the pool.
/// Returns the ids added per row.
std::vector<std::vector<int>> extend_item_context(adapter::ItemContext& pool, const Tensor& f,
                                                  const backbone::EmbeddingTable& table, std::size_t k,
                                                  std::span<const std::vector<int>> extra_exclude = {});

}  // namespace engine
ADARET_END_NAMESPACE
