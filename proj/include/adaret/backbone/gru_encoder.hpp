// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "adaret/backbone/encoder.hpp"
#include "adaret/compute/gru.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

/// GRU over the real positions of each row from a zero initial state; the
/// final hidden state is the user vector. Padding steps are skipped.
class GruEncoder final : public SequenceEncoder {
   public:
    GruEncoder(const EncoderOptions& options, Rng& rng);

    BackboneKind kind() const override { return BackboneKind::gru; }
    Tensor encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const override;
    void collect(ParamList& out) const override;

    compute::GruParams gru;
};

}  // namespace backbone
ADARET_END_NAMESPACE
