// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adaret/compute/tensor.hpp"
#include "adaret/rng.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

/// Gate weights of a GRU cell, one matrix per gate:
///   r  = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
///   z  = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
///   n  = tanh(x W_in + b_in + r * (h W_hn + b_hn))
///   h' = (1 - z) * n + z * h
struct GruParams {
    Tensor w_ir, w_iz, w_in;  // [input, hidden]
    Tensor w_hr, w_hz, w_hn;  // [hidden, hidden]
    Tensor b_ir, b_iz, b_in, b_hr, b_hz, b_hn;  // [hidden]

    std::size_t input_dim() const { return w_ir.dim(0); }
    std::size_t hidden_dim() const { return w_ir.dim(1); }

    /// Uniform(+-1/sqrt(hidden)) weights, zero biases.
    static GruParams init(std::size_t input, std::size_t hidden, Rng& rng);
    void collect(const std::string& prefix, ParamList& out) const;
};

/// One step: x [B, input], h [B, hidden] -> [B, hidden].
Tensor gru_cell(const Tensor& x, const Tensor& h, const GruParams& params);

struct GruOutput {
    std::vector<Tensor> states;  // one [B, hidden] per step
    Tensor final;
};

/// Runs the recurrence over `inputs` (each [B, input]) starting from h0.
/// `active` (steps x B, optional) marks which rows advance at each step;
/// inactive rows carry their previous state unchanged. An empty sequence
/// returns h0 as the final state.
GruOutput gru_sequence(std::span<const Tensor> inputs, const Tensor& h0, const GruParams& params,
                       std::span<const std::uint8_t> active = {});

/// Same recurrence over x [B, L, input] with the input projections batched.
GruOutput gru_sequence(const Tensor& inputs, const Tensor& h0, const GruParams& params,
                       std::span<const std::uint8_t> active = {});

}  // namespace compute
ADARET_END_NAMESPACE
