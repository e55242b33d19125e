// SPDX-License-Identifier: Apache-2.0
#include "adaret/backbone/gru_encoder.hpp"

#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

using namespace compute;

GruEncoder::GruEncoder(const EncoderOptions& o, Rng& rng) : SequenceEncoder(o) {
    gru = GruParams::init(o.dim, o.dim, rng);
}

Tensor GruEncoder::encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const {
    check_lengths(e, lengths);
    const std::size_t B = e.dim(0), W = e.dim(1);
    const Tensor x = dropout(e, options_.dropout, mode, rng);
    // Step-major activity: step c advances row b only at real positions.
    const auto real = real_position_mask(lengths, W);
    std::vector<std::uint8_t> active(W * B);
    for (std::size_t c = 0; c < W; ++c) {
        for (std::size_t b = 0; b < B; ++b) active[c * B + b] = real[b * W + c];
    }
    return gru_sequence(x, Tensor::zeros({B, options_.dim}), gru, active).final;
}

void GruEncoder::collect(ParamList& out) const { gru.collect("backbone.gru.", out); }

}  // namespace backbone
ADARET_END_NAMESPACE
