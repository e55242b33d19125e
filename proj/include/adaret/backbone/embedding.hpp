// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"
#include "adaret/rng.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

using compute::Tensor;

/// Score given to excluded items and to the padding id.
inline constexpr Real kExcludedScore = -std::numeric_limits<Real>::infinity();

/// Item embeddings [num_items + 1, d]. Row 0 is the padding item: it starts
/// at zero and never receives a gradient, so it stays zero.
struct EmbeddingTable {
    Tensor weight;

    static EmbeddingTable init(std::size_t num_items, std::size_t dim, Rng& rng);
    std::size_t num_items() const { return weight.dim(0) - 1; }
    std::size_t dim() const { return weight.dim(1); }
};

/// Gathers rows for ids [rows, width] -> [rows, width, d]; id 0 gives zeros.
Tensor embed_sequence(const EmbeddingTable& table, std::span<const int> ids, std::size_t rows, std::size_t width);

/// Dot-product scores of every item against F [B, d], returned as a
/// row-major [B, num_items + 1] matrix. Column 0 (padding) and each row's
/// excluded ids hold kExcludedScore. No graph is recorded.
std::vector<Real> score_items(const Tensor& f, const EmbeddingTable& table,
                              std::span<const std::vector<int>> exclude = {});

}  // namespace backbone
ADARET_END_NAMESPACE
