// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"
#include "adaret/engine/config.hpp"
#include "adaret/rng.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

using compute::Mode;
using compute::ParamList;
using compute::Tensor;
using config::BackboneKind;

/// Shape settings shared by every encoder.
struct EncoderOptions {
    std::size_t dim = 64;
    std::size_t max_len = 50;
    std::size_t blocks = 2;
    std::size_t heads = 2;
    double dropout = 0.2;
    /// Filter-MLP only: include the position-wise feed-forward sublayer.
    bool feed_forward = true;

    static EncoderOptions from_config(const config::TrainConfig& cfg);
};

/// Maps an embedded, left-padded sequence E [B, W, d] to one user vector per
/// row [B, d]. `lengths[b]` counts the real (rightmost) positions of row b.
class SequenceEncoder {
   public:
    virtual ~SequenceEncoder() = default;

    virtual BackboneKind kind() const = 0;
    virtual Tensor encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const = 0;
    /// Appends every trainable tensor under stable names.
    virtual void collect(ParamList& out) const = 0;
    /// Width the encoder wants for a batch whose longest row has `longest`
    /// items. Recurrent and attention encoders only need the occupied columns.
    virtual std::size_t width_for(std::size_t longest) const { return longest; }

    const EncoderOptions& options() const { return options_; }

   protected:
    explicit SequenceEncoder(EncoderOptions options) : options_(options) {}
    EncoderOptions options_;
};

std::unique_ptr<SequenceEncoder> make_encoder(BackboneKind kind, const EncoderOptions& options, Rng& rng);

/// 1 for real positions of a left-padded [B, W] layout, 0 for padding.
std::vector<std::uint8_t> real_position_mask(std::span<const std::size_t> lengths, std::size_t width);

/// Validates lengths against the tensor and rejects empty rows.
void check_lengths(const Tensor& e, std::span<const std::size_t> lengths);

}  // namespace backbone
ADARET_END_NAMESPACE
