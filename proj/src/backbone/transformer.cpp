// SPDX-License-Identifier: Apache-2.0
#include "adaret/backbone/transformer.hpp"

#include "adaret/compute/init.hpp"
#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

using namespace compute;

TransformerEncoder::TransformerEncoder(const EncoderOptions& o, Rng& rng) : SequenceEncoder(o) {
    const std::size_t d = o.dim;
    if (o.heads == 0 || d % o.heads != 0) throw ConfigError("heads: must divide dim");
    positions = fan_in_param({o.max_len, d}, d, rng);
    ln_in_g = constant_param({d}, 1);
    ln_in_b = constant_param({d}, 0);
    for (std::size_t i = 0; i < o.blocks; ++i) {
        TransformerBlock b;
        b.wq = fan_in_param({d, d}, d, rng);
        b.wk = fan_in_param({d, d}, d, rng);
        b.wv = fan_in_param({d, d}, d, rng);
        b.wo = fan_in_param({d, d}, d, rng);
        b.bq = constant_param({d}, 0);
        b.bk = constant_param({d}, 0);
        b.bv = constant_param({d}, 0);
        b.bo = constant_param({d}, 0);
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

std::vector<std::uint8_t> causal_mask(std::span<const std::size_t> lengths, std::size_t width) {
    const std::size_t B = lengths.size();
    std::vector<std::uint8_t> mask(B * width * width, 0);
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t first = width - std::min(width, lengths[b]);
        for (std::size_t i = 0; i < width; ++i) {
            std::uint8_t* row = mask.data() + (b * width + i) * width;
            if (i < first) {
                row[i] = 1;
                continue;
            }
            for (std::size_t j = first; j <= i; ++j) row[j] = 1;
        }
    }
    return mask;
}

Tensor TransformerEncoder::hidden_states(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng,
                                         std::vector<Real>* first_block_weights) const {
    check_lengths(e, lengths);
    const std::size_t W = e.dim(1);
    const std::size_t L = options_.max_len;
    if (W > L) throw ShapeError("transformer: batch width exceeds max_len");
    std::vector<int> pos_ids(W);
    for (std::size_t c = 0; c < W; ++c) pos_ids[c] = static_cast<int>(L - W + c);
    const Tensor p = gather_rows(positions, pos_ids, {W});

    Tensor x = layer_norm(add_bcast(e, p), ln_in_g, ln_in_b);
    x = dropout(x, options_.dropout, mode, rng);
    const auto mask = causal_mask(lengths, W);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const Tensor q = dense(x, b.wq, b.bq);
        const Tensor k = dense(x, b.wk, b.bk);
        const Tensor v = dense(x, b.wv, b.bv);
        Tensor a = attention(q, k, v, options_.heads, mask, i == 0 ? first_block_weights : nullptr);
        a = dropout(dense(a, b.wo, b.bo), options_.dropout, mode, rng);
        x = layer_norm(add(x, a), b.ln1_g, b.ln1_b);
        Tensor f = dense(gelu(dense(x, b.ff1_w, b.ff1_b)), b.ff2_w, b.ff2_b);
        f = dropout(f, options_.dropout, mode, rng);
        x = layer_norm(add(x, f), b.ln2_g, b.ln2_b);
    }
    return x;
}

Tensor TransformerEncoder::encode(const Tensor& e, std::span<const std::size_t> lengths, Mode mode, Rng& rng) const {
    const Tensor h = hidden_states(e, lengths, mode, rng);
    // Left padding puts every row's most recent item in the last column.
    const std::vector<std::size_t> last(lengths.size(), e.dim(1) - 1);
    return select_positions(h, last);
}

void TransformerEncoder::collect(ParamList& out) const {
    out.push_back({"backbone.positions", positions});
    out.push_back({"backbone.ln_in.gamma", ln_in_g});
    out.push_back({"backbone.ln_in.beta", ln_in_b});
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const std::string p = "backbone.block" + std::to_string(i) + ".";
        out.push_back({p + "attn.wq", b.wq});
        out.push_back({p + "attn.bq", b.bq});
        out.push_back({p + "attn.wk", b.wk});
        out.push_back({p + "attn.bk", b.bk});
        out.push_back({p + "attn.wv", b.wv});
        out.push_back({p + "attn.bv", b.bv});
        out.push_back({p + "attn.wo", b.wo});
        out.push_back({p + "attn.bo", b.bo});
        out.push_back({p + "ln1.gamma", b.ln1_g});
        out.push_back({p + "ln1.beta", b.ln1_b});
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
