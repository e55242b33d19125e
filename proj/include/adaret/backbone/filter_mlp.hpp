// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaret/backbone/encoder.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

struct FilterBlock {
    Tensor w_re, w_im;  // [max_len/2 + 1, d]
    Tensor ln1_g, ln1_b;
    Tensor ff1_w, ff1_b, ff2_w, ff2_b;
    Tensor ln2_g, ln2_b;
};

/// All-MLP encoder whose token mixing is a learnable filter in the frequency
/// domain of the position axis. Always runs at the full max_len width.
/// Padding rows are held at zero between sublayers.
class FilterMlpEncoder final : public SequenceEncoder {
   public:
    FilterMlpEncoder(const EncoderOptions& options, Rng& rng);

    BackboneKind kind() const override { return BackboneKind::filter_mlp; }
    Tensor encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const override;
    void collect(ParamList& out) const override;
    std::size_t width_for(std::size_t) const override { return options_.max_len; }

    /// Per-position outputs [B, max_len, d].
    Tensor hidden_states(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const;

    Tensor ln_in_g, ln_in_b;
    std::vector<FilterBlock> blocks;
};

}  // namespace backbone
ADARET_END_NAMESPACE
