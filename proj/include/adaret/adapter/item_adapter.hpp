// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaret/adapter/context.hpp"
#include "adaret/backbone/embedding.hpp"
#include "adaret/compute/ops.hpp"
#include "adaret/engine/config.hpp"

ADARET_BEGIN_NAMESPACE
namespace adapter {

using compute::Mode;
using compute::ParamList;
using config::AdapterToggles;

/// Learnable complex filter over the context axis plus its residual norm.
struct LftParams {
    std::size_t capacity = 0;
    Tensor w_re, w_im;  // [capacity/2 + 1, d]
    Tensor ln_g, ln_b;
    double dropout = 0.2;

    /// Filter starts as the identity (1 + 0i).
    static LftParams init(std::size_t capacity, std::size_t dim, double dropout);
    void collect(const std::string& prefix, ParamList& out) const;
};

/// Context attention. Queries are history items, keys and values are context
/// items. Projections are optional; without them raw features are used.
struct CatParams {
    bool projections = false;
    Tensor wq, wk, wv;  // [d, d], only with projections
    Tensor ln_g, ln_b;
    double dropout = 0.2;

    static CatParams init(std::size_t dim, bool projections, double dropout, Rng& rng);
    void collect(const std::string& prefix, ParamList& out) const;
};

struct IraParams {
    LftParams lft;
    CatParams cat;

    void collect(ParamList& out) const;
};

/// H = layer_norm(E_ctx + dropout(irfft(W * rfft(E_ctx)))) along the slot axis.
/// e_ctx: [B, capacity, d]; empty slots must hold zeros.
Tensor lft(const Tensor& e_ctx, const LftParams& params, Mode mode, Rng& rng);

/// E' = layer_norm(E_seq + dropout(softmax(Q K^T / sqrt(d)) V)) with Q from
/// e_seq [B, W, d] and K = V from h_ctx [B, C, d]. ctx_mask is [B, C]; every
/// row needs at least one valid slot.
Tensor cat(const Tensor& e_seq, const Tensor& h_ctx, std::span<const std::uint8_t> ctx_mask, const CatParams& params,
           Mode mode, Rng& rng, std::vector<Real>* weights = nullptr);

/// Full item adapter. Rows with an empty pool, padding positions and the
/// disabled adapter all return e_seq unchanged. lengths give the real
/// (rightmost) positions of each row of e_seq.
Tensor ira(const Tensor& e_seq, std::span<const std::size_t> lengths, const ItemContext& ctx,
           const backbone::EmbeddingTable& table, const IraParams& params, const AdapterToggles& toggles, Mode mode,
           Rng& rng);

}  // namespace adapter
ADARET_END_NAMESPACE
