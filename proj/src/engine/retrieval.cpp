// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/retrieval.hpp"

#include <algorithm>

#include "adaret/engine/rounds.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

std::vector<RetrievalResult> retrieve_batch(const Model& model, const data::Batch& batch, const RetrievalSpec& spec) {
    if (spec.rounds < 1) throw ConfigError("rounds: must be at least 1");
    const auto T = static_cast<std::size_t>(spec.rounds);
    if (spec.k == 0 || spec.k % T != 0) {
        throw ConfigError("eval_k: " + std::to_string(spec.k) + " is not divisible by rounds " + std::to_string(T));
    }
    const std::size_t per_round = spec.k / T;
    const std::size_t ctx_per_round = std::min(per_round, static_cast<std::size_t>(model.config().k_ctx));
    const std::size_t capacity = model.config().context_capacity();
    const bool track_items = spec.toggles.ira;
    if (track_items && (T - 1) * ctx_per_round > capacity) {
        throw ConfigError("rounds: " + std::to_string(T) + " rounds overflow the model's item context capacity " +
                          std::to_string(capacity));
    }
    const std::size_t N = model.num_items();
    for (std::size_t b = 0; b < batch.rows; ++b) {
        if (N < batch.history[b].size() + spec.k) {
            throw DataError("candidate pool exhausted for user " + std::to_string(batch.users[b]));
        }
    }

    compute::NoGradGuard no_grad;
    Rng rng(0);  // dropout is inactive in eval mode
    RoundState state = initial_state(batch.rows, capacity);
    std::vector<std::vector<int>> exclude(batch.history.begin(), batch.history.end());
    std::vector<RetrievalResult> out(batch.rows);
    for (std::size_t t = 1; t <= T; ++t) {
        const auto f = forward_round(model, batch, state, spec.toggles, Mode::eval, rng).adapted;
        const auto scores = backbone::score_items(f, model.table, exclude);
        const std::size_t V = N + 1;
        for (std::size_t b = 0; b < batch.rows; ++b) {
            const auto picked = top_k_ids(std::span<const Real>(scores.data() + b * V, V), per_round);
            for (int id : picked) {
                out[b].items.push_back(id);
                out[b].rounds.push_back(static_cast<int>(t));
                exclude[b].push_back(id);
            }
            if (track_items && t < T) {
                state.items.append(b, std::span<const int>(picked.data(), ctx_per_round));
            }
        }
        if (t < T) state.users = adapter::extend_user_context(std::move(state.users), f);
    }
    return out;
}

RetrievalResult retrieve(const Model& model, std::span<const int> sequence, std::span<const int> exclude,
                         const RetrievalSpec& spec) {
    data::Example ex{0, std::vector<int>(sequence.begin(), sequence.end()), 0};
    auto batch = data::collate(std::span<const data::Example>(&ex, 1), static_cast<std::size_t>(model.config().max_len));
    auto hist = std::vector<int>(exclude.begin(), exclude.end());
    std::sort(hist.begin(), hist.end());
    hist.erase(std::unique(hist.begin(), hist.end()), hist.end());
    batch.history[0] = std::move(hist);
    return retrieve_batch(model, batch, spec).front();
}

}  // namespace engine
ADARET_END_NAMESPACE
