// SPDX-License-Identifier: Apache-2.0
#include "adaret/backbone/encoder.hpp"

#include "adaret/backbone/filter_mlp.hpp"
#include "adaret/backbone/gru_encoder.hpp"
#include "adaret/backbone/transformer.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

EncoderOptions EncoderOptions::from_config(const config::TrainConfig& cfg) {
    EncoderOptions o;
    o.dim = static_cast<std::size_t>(cfg.dim);
    o.max_len = static_cast<std::size_t>(cfg.max_len);
    o.blocks = static_cast<std::size_t>(cfg.blocks);
    o.heads = static_cast<std::size_t>(cfg.heads);
    o.dropout = cfg.dropout;
    return o;
}

std::unique_ptr<SequenceEncoder> make_encoder(BackboneKind kind, const EncoderOptions& options, Rng& rng) {
    switch (kind) {
        case BackboneKind::transformer: return std::make_unique<TransformerEncoder>(options, rng);
        case BackboneKind::gru: return std::make_unique<GruEncoder>(options, rng);
        case BackboneKind::filter_mlp: return std::make_unique<FilterMlpEncoder>(options, rng);
    }
    throw ConfigError("unknown backbone kind");
}

std::vector<std::uint8_t> real_position_mask(std::span<const std::size_t> lengths, std::size_t width) {
    std::vector<std::uint8_t> mask(lengths.size() * width, 0);
    for (std::size_t b = 0; b < lengths.size(); ++b) {
        for (std::size_t c = width - std::min(width, lengths[b]); c < width; ++c) mask[b * width + c] = 1;
    }
    return mask;
}

void check_lengths(const Tensor& e, std::span<const std::size_t> lengths) {
    if (e.rank() != 3) throw ShapeError("encoder input must be [B, W, d], got " + compute::to_string(e.shape()));
    if (lengths.size() != e.dim(0)) throw ShapeError("encoder: one length per row required");
    for (auto len : lengths) {
        if (len == 0) throw DataError("empty sequence");
        if (len > e.dim(1)) throw ShapeError("encoder: length exceeds batch width");
    }
}

}  // namespace backbone
ADARET_END_NAMESPACE
