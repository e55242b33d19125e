// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaret/backbone/encoder.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

struct TransformerBlock {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln1_g, ln1_b;
    Tensor ff1_w, ff1_b, ff2_w, ff2_b;
    Tensor ln2_g, ln2_b;
};

/// Self-attention encoder with learned positional embeddings and post-norm
/// blocks. Positions are indexed from the most recent item backwards, so
/// the amount of left padding never changes a row's output.
class TransformerEncoder final : public SequenceEncoder {
   public:
    TransformerEncoder(const EncoderOptions& options, Rng& rng);

    BackboneKind kind() const override { return BackboneKind::transformer; }
    Tensor encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const override;
    void collect(ParamList& out) const override;

    /// Per-position outputs [B, W, d] of the final block.
    Tensor hidden_states(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng,
                         std::vector<Real>* first_block_weights = nullptr) const;

    Tensor positions;  // [max_len, d]
    Tensor ln_in_g, ln_in_b;
    std::vector<TransformerBlock> blocks;
};

/// Causal mask [B, W, W]: real queries see real keys at or before them, a
/// padding query sees only itself.
std::vector<std::uint8_t> causal_mask(std::span<const std::size_t> lengths, std::size_t width);

}  // namespace backbone
ADARET_END_NAMESPACE
