// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaret/adapter/context.hpp"
#include "adaret/compute/gru.hpp"
#include "adaret/compute/ops.hpp"
#include "adaret/engine/config.hpp"

ADARET_BEGIN_NAMESPACE
namespace adapter {

using compute::Mode;
using compute::ParamList;
using config::AdapterToggles;

struct UraParams {
    compute::GruParams gru;
    Tensor w1, b1;  // [2d, d], [d]
    Tensor w2, b2;  // [d, d], [d]
    Tensor ln_g, ln_b;
    double dropout = 0.2;

    static UraParams init(std::size_t dim, double dropout, Rng& rng);
    void collect(ParamList& out) const;
};

/// Summary of the stack: the context GRU's final state (or the plain mean
/// when the GRU is toggled off). An empty stack gives zeros [B, d].
Tensor summarize_stack(const UserContextStack& stack, std::size_t rows, const UraParams& params,
                       const AdapterToggles& toggles);

/// F' = layer_norm(F + dropout(W2 relu(W1 [C; F] + b1) + b2)), with C the
/// stack summary; without the MLP, F' = layer_norm(F + C).
Tensor ura(const Tensor& f, const UserContextStack& stack, const UraParams& params, const AdapterToggles& toggles,
           Mode mode, Rng& rng);

}  // namespace adapter
ADARET_END_NAMESPACE
