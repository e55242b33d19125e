// SPDX-License-Identifier: Apache-2.0
#include "adaret/backbone/filter_mlp.hpp"

#include "adaret/compute/fft.hpp"
#include "adaret/compute/init.hpp"
#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

using namespace compute;

FilterMlpEncoder::FilterMlpEncoder(const EncoderOptions& o, Rng& rng) : SequenceEncoder(o) {
    const std::size_t d = o.dim;
    const std::size_t bins = spectrum_bins(o.max_len);
    ln_in_g = constant_param({d}, 1);
    ln_in_b = constant_param({d}, 0);
    for (std::size_t i = 0; i < o.blocks; ++i) {
        FilterBlock b;
        b.w_re = constant_param({bins, d}, 1);
        b.w_im = constant_param({bins, d}, 0);
        b.ln1_g = constant_param({d}, 1);
        b.ln1_b = constant_param({d}, 0);
        b.ff1_w = fan_in_param({d, 4 * d}, d, rng);
        b.ff1_b = constant_param({4 * d}, 0);
        b.ff2_w = fan_in_param({4 * d, d}, 4 * d, rng);
        b.ff2_b = constant_param({d}, 0);
        b.ln2_g = constant_param({d}, 1);
        b.ln2_b = constant_param({d}, 0);
        blocks.push_back(std::move(b));
    }
}

Tensor FilterMlpEncoder::hidden_states(const Tensor& e, std::span<const std::size_t> lengths, Mode mode,
                                       Rng& rng) const {
    check_lengths(e, lengths);
    if (e.dim(1) != options_.max_len) throw ShapeError("filter_mlp: batch width must equal max_len");
    const auto real = real_position_mask(lengths, e.dim(1));
    const Tensor zero = Tensor::zeros(e.shape());
    auto keep_real = [&](const Tensor& t) { return where_rows(t, zero, real); };

    Tensor x = keep_real(dropout(layer_norm(e, ln_in_g, ln_in_b), options_.dropout, mode, rng));
    for (const auto& b : blocks) {
        Tensor s = dropout(spectral_filter(x, b.w_re, b.w_im), options_.dropout, mode, rng);
        x = keep_real(layer_norm(add(x, s), b.ln1_g, b.ln1_b));
        if (!options_.feed_forward) continue;
        Tensor f = dense(gelu(dense(x, b.ff1_w, b.ff1_b)), b.ff2_w, b.ff2_b);
        f = dropout(f, options_.dropout, mode, rng);
        x = keep_real(layer_norm(add(x, f), b.ln2_g, b.ln2_b));
    }
    return x;
}

Tensor FilterMlpEncoder::encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const {
    const Tensor h = hidden_states(e, lengths, mode, rng);
    const std::vector<std::size_t> last(lengths.size(), e.dim(1) - 1);
    return select_positions(h, last);
}

void FilterMlpEncoder::collect(ParamList& out) const {
    out.push_back({"backbone.ln_in.gamma", ln_in_g});
    out.push_back({"backbone.ln_in.beta", ln_in_b});
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const std::string p = "backbone.block" + std::to_string(i) + ".";
        out.push_back({p + "filter.re", b.w_re});
        out.push_back({p + "filter.im", b.w_im});
        out.push_back({p + "ln1.gamma", b.ln1_g});
        out.push_back({p + "ln1.beta", b.ln1_b});
        if (!options_.feed_forward) continue;
        out.push_back({p + "ff1.w", b.ff1_w});
        out.push_back({p + "ff1.b", b.ff1_b});
        out.push_back({p + "ff2.w", b.ff2_w});
        out.push_back({p + "ff2.b", b.ff2_b});
        out.push_back({p + "ln2.gamma", b.ln2_g});
        out.push_back({p + "ln2.beta", b.ln2_b});
    }
}

}  // namespace backbone
ADARET_END_NAMESPACE
