// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/rounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

ADARET_BEGIN_NAMESPACE
namespace engine {

RoundState initial_state(std::size_t rows, std::size_t capacity) {
    return RoundState{adapter::ItemContext(rows, capacity), {}};
}

RoundOutput forward_round(const Model& model, const data::Batch& batch, const RoundState& state,
                          const config::AdapterToggles& toggles, Mode mode, Rng& rng) {
    const std::size_t longest = *std::max_element(batch.lengths.begin(), batch.lengths.end());
    const std::size_t width = model.encoder->width_for(longest);
    if (width > batch.width) {
        throw ShapeError("batch width " + std::to_string(batch.width) + " is below the encoder's " +
                         std::to_string(width));
    }
    // Keep only the rightmost `width` columns; left padding makes them the occupied ones.
    std::vector<int> ids(batch.rows * width);
    for (std::size_t r = 0; r < batch.rows; ++r) {
        std::copy_n(batch.ids.begin() + static_cast<std::ptrdiff_t>((r + 1) * batch.width - width), width,
                    ids.begin() + static_cast<std::ptrdiff_t>(r * width));
    }
    std::vector<std::size_t> lengths(batch.lengths);
    for (auto& len : lengths) len = std::min(len, width);

    const Tensor e = backbone::embed_sequence(model.table, ids, batch.rows, width);
    const Tensor e_adapted = adapter::ira(e, lengths, state.items, model.table, model.ira, toggles, mode, rng);
    const Tensor f = model.encoder->encode(e_adapted, lengths, mode, rng);
    return {f, adapter::ura(f, state.users, model.ura, toggles, mode, rng)};
}

std::vector<int> top_k_ids(std::span<const Real> scores, std::size_t k) {
    std::vector<int> candidates;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (std::isfinite(scores[i])) candidates.push_back(static_cast<int>(i));
    }
    if (candidates.size() < k) {
        throw DataError("candidate pool exhausted: " + std::to_string(candidates.size()) + " selectable items, " +
                        std::to_string(k) + " requested");
    }
    auto better = [&](int a, int b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                      better);
    candidates.resize(k);
    return candidates;
}

std::vector<std::vector<int>> extend_item_context(adapter::ItemContext& pool, const Tensor& f,
                                                  const backbone::EmbeddingTable& table, std::size_t k,
                                                  std::span<const std::vector<int>> extra_exclude) {
    const std::size_t B = pool.rows();
    if (f.rank() != 2 || f.dim(0) != B) throw ShapeError("extend_item_context: one user vector per pool row required");
    if (!extra_exclude.empty() && extra_exclude.size() != B) {
        throw ShapeError("extend_item_context: one exclusion set per row required");
    }
    std::vector<std::vector<int>> exclude(B);
    for (std::size_t b = 0; b < B; ++b) {
        const auto row = pool.row(b);
        exclude[b].assign(row.begin(), row.end());
        if (!extra_exclude.empty()) exclude[b].insert(exclude[b].end(), extra_exclude[b].begin(), extra_exclude[b].end());
    }
    const auto scores = backbone::score_items(f, table, exclude);
    const std::size_t V = table.num_items() + 1;
    std::vector<std::vector<int>> added(B);
    for (std::size_t b = 0; b < B; ++b) {
        added[b] = top_k_ids(std::span<const Real>(scores.data() + b * V, V), k);
        pool.append(b, added[b]);
    }
    return added;
}

}  // namespace engine
ADARET_END_NAMESPACE
