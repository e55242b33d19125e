// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/loss.hpp"

#include <algorithm>
#include <cmath>

#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

namespace {

constexpr double kClamp = 1e-12;

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

}  // namespace

Tensor round_loss(const Tensor& scores) {
    if (scores.rank() != 2 || scores.dim(1) == 0 || scores.dim(0) == 0) {
        throw ShapeError("round_loss: expected scores [B, 1 + n], got " + compute::to_string(scores.shape()));
    }
    const std::size_t B = scores.dim(0), m = scores.dim(1);
    std::vector<Real> dscore(B * m);
    double total = 0;
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t j = 0; j < m; ++j) {
            const double s = sigmoid(scores[b * m + j]);
            // Positive: -log(s); negative: -log(1 - s). Clamped terms are constant.
            const double arg = j == 0 ? s : 1.0 - s;
            total -= std::log(std::max(arg, kClamp));
            double grad = 0;
            if (arg > kClamp) grad = j == 0 ? -(1.0 - s) : s;
            dscore[b * m + j] = static_cast<Real>(grad / static_cast<double>(B));
        }
    }
    return compute::make_result(
        {}, {static_cast<Real>(total / static_cast<double>(B))}, {scores},
        [dscore = std::move(dscore)](compute::Node& self) {
            auto& parent = *self.parents[0];
            if (!parent.requires_grad) return;
            parent.ensure_grad();
            for (std::size_t i = 0; i < dscore.size(); ++i) parent.grad[i] += self.grad[0] * dscore[i];
        },
        "round_loss");
}

Tensor total_loss(std::span<const Tensor> per_round, double lambda) {
    if (per_round.empty()) throw ShapeError("total_loss: no rounds");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda: must lie in (0, 1]");
    Tensor total;
    double weight = 1.0;
    for (const auto& l : per_round) {
        weight *= lambda;
        const Tensor term = compute::scale(l, static_cast<Real>(weight));
        total = total.defined() ? compute::add(total, term) : term;
    }
    return total;
}

std::vector<int> scoring_ids(const data::Batch& batch, std::size_t num_items, std::size_t n_neg, bool full_vocab,
                             Rng& rng, std::size_t& per_row) {
    std::vector<int> ids;
    if (full_vocab) {
        per_row = num_items;
        ids.reserve(batch.rows * per_row);
        for (std::size_t b = 0; b < batch.rows; ++b) {
            const int target = batch.targets[b];
            ids.push_back(target);
            for (int i = 1; i <= static_cast<int>(num_items); ++i) {
                if (i != target) ids.push_back(i);
            }
        }
        return ids;
    }
    per_row = 1 + n_neg;
    ids.reserve(batch.rows * per_row);
    for (std::size_t b = 0; b < batch.rows; ++b) {
        const int target = batch.targets[b];
        const auto& hist = batch.history[b];
        const bool target_in_hist = std::binary_search(hist.begin(), hist.end(), target);
        const std::size_t blocked = hist.size() + (target_in_hist ? 0 : 1);
        if (n_neg > 0 && blocked >= num_items) {
            throw DataError("no negative items available for user " + std::to_string(batch.users[b]));
        }
        ids.push_back(target);
        for (std::size_t j = 0; j < n_neg; ++j) {
            int cand = 0;
            do {
                cand = 1 + static_cast<int>(rng.below(num_items));
            } while (cand == target || std::binary_search(hist.begin(), hist.end(), cand));
            ids.push_back(cand);
        }
    }
    return ids;
}

}  // namespace engine
ADARET_END_NAMESPACE
