// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"
#include "adaret/rng.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// `b`'s shape must be a suffix of `a`'s shape; b is broadcast over the leading axes.
Tensor add_bcast(const Tensor& a, const Tensor& b);
Tensor mul_bcast(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& x, Real factor);

Tensor relu(const Tensor& x);
/// tanh approximation of GELU.
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

/// x[..., K] * w[K, N] -> [..., N].
Tensor matmul(const Tensor& x, const Tensor& w);
/// a[M, K] * b[N, K]^T -> [M, N].
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// x W + b.
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b);

/// Normalizes each row over the last axis (biased variance), then applies gamma/beta.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps = Real(1e-12));

/// Softmax over the last axis restricted to mask != 0. Masked entries are exactly 0.
/// Throws "no valid attention targets" for a fully masked row.
Tensor masked_softmax(const Tensor& scores, std::span<const std::uint8_t> mask);

/// Multi-head scaled dot-product attention. q: [B, Lq, D], k/v: [B, Lk, D],
/// mask: [B, Lq, Lk] (shared by all heads, 1 = may attend). Scale is
/// 1/sqrt(D / heads). If `weights` is non-null it receives the attention
/// probabilities laid out [B, heads, Lq, Lk].
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t heads,
                 std::span<const std::uint8_t> mask, std::vector<Real>* weights = nullptr);

/// Inverted dropout: survivors are scaled by 1/(1-p) at train time, eval is identity.
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng);

/// Row gather: table [V, d], ids shaped `index_shape` -> index_shape + [d].
/// Rows equal to `pad_id` produce zeros and receive no gradient.
Tensor gather_rows(const Tensor& table, std::span<const int> ids, const Shape& index_shape, int pad_id = -1);

/// x [B, L, d], one position per row -> [B, d].
Tensor select_positions(const Tensor& x, std::span<const std::size_t> positions);

/// Concatenate along the last axis; leading shapes must agree.
Tensor concat_last(const Tensor& a, const Tensor& b);

/// Per row (all axes but the last), take a's row where take_a != 0, else b's.
Tensor where_rows(const Tensor& a, const Tensor& b, std::span<const std::uint8_t> take_a);

/// Mean over valid slots: x [B, C, d], mask [B, C] -> [B, d]. Rows with no valid slot give zeros.
Tensor masked_mean_slots(const Tensor& x, std::span<const std::uint8_t> mask);

/// x [B, d] -> [B, L, d].
Tensor repeat_positions(const Tensor& x, std::size_t length);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor reshape(const Tensor& x, Shape shape);

/// Row-wise dot products against selected table rows:
/// f [B, d], table [V, d], ids [B, m] -> [B, m].
Tensor gather_scores(const Tensor& f, const Tensor& table, std::span<const int> ids, std::size_t per_row);

}  // namespace compute
ADARET_END_NAMESPACE
