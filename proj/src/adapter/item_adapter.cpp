// SPDX-License-Identifier: Apache-2.0
#include "adaret/adapter/item_adapter.hpp"

#include <cmath>

#include "adaret/compute/fft.hpp"
#include "adaret/compute/init.hpp"

ADARET_BEGIN_NAMESPACE
namespace adapter {

using namespace compute;

LftParams LftParams::init(std::size_t capacity, std::size_t dim, double dropout) {
    LftParams p;
    p.capacity = capacity;
    const std::size_t bins = spectrum_bins(std::max<std::size_t>(capacity, 1));
    p.w_re = constant_param({bins, dim}, 1);
    p.w_im = constant_param({bins, dim}, 0);
    p.ln_g = constant_param({dim}, 1);
    p.ln_b = constant_param({dim}, 0);
    p.dropout = dropout;
    return p;
}

void LftParams::collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + "filter.re", w_re});
    out.push_back({prefix + "filter.im", w_im});
    out.push_back({prefix + "ln.gamma", ln_g});
    out.push_back({prefix + "ln.beta", ln_b});
}

CatParams CatParams::init(std::size_t dim, bool projections, double dropout, Rng& rng) {
    CatParams p;
    p.projections = projections;
    if (projections) {
        p.wq = fan_in_param({dim, dim}, dim, rng);
        p.wk = fan_in_param({dim, dim}, dim, rng);
        p.wv = fan_in_param({dim, dim}, dim, rng);
    }
    p.ln_g = constant_param({dim}, 1);
    p.ln_b = constant_param({dim}, 0);
    p.dropout = dropout;
    return p;
}

void CatParams::collect(const std::string& prefix, ParamList& out) const {
    if (projections) {
        out.push_back({prefix + "wq", wq});
        out.push_back({prefix + "wk", wk});
        out.push_back({prefix + "wv", wv});
    }
    out.push_back({prefix + "ln.gamma", ln_g});
    out.push_back({prefix + "ln.beta", ln_b});
}

void IraParams::collect(ParamList& out) const {
    lft.collect("adapter.ira.lft.", out);
    cat.collect("adapter.ira.cat.", out);
}

Tensor lft(const Tensor& e_ctx, const LftParams& params, Mode mode, Rng& rng) {
    if (e_ctx.rank() != 3) throw ShapeError("lft: expected [B, C, d]");
    if (e_ctx.dim(1) != params.capacity || params.w_re.dim(0) != spectrum_bins(e_ctx.dim(1))) {
        throw ShapeError("lft: context capacity " + std::to_string(e_ctx.dim(1)) + " does not match filter with " +
                         std::to_string(params.w_re.dim(0)) + " bins");
    }
    const Tensor filtered = spectral_filter(e_ctx, params.w_re, params.w_im);
    return layer_norm(add(e_ctx, dropout(filtered, params.dropout, mode, rng)), params.ln_g, params.ln_b);
}

Tensor cat(const Tensor& e_seq, const Tensor& h_ctx, std::span<const std::uint8_t> ctx_mask, const CatParams& params,
           Mode mode, Rng& rng, std::vector<Real>* weights) {
    if (e_seq.rank() != 3 || h_ctx.rank() != 3 || e_seq.dim(0) != h_ctx.dim(0) || e_seq.dim(2) != h_ctx.dim(2)) {
        throw ShapeError("cat: incompatible shapes " + to_string(e_seq.shape()) + " and " + to_string(h_ctx.shape()));
    }
    const std::size_t B = e_seq.dim(0), W = e_seq.dim(1), C = h_ctx.dim(1);
    if (ctx_mask.size() != B * C) throw ShapeError("cat: context mask size mismatch");
    std::vector<std::uint8_t> mask(B * W * C);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < W; ++i) std::copy_n(ctx_mask.data() + b * C, C, mask.data() + (b * W + i) * C);
    }
    Tensor q = e_seq, k = h_ctx, v = h_ctx;
    if (params.projections) {
        q = matmul(e_seq, params.wq);
        k = matmul(h_ctx, params.wk);
        v = matmul(h_ctx, params.wv);
    }
    const Tensor attended = attention(q, k, v, 1, mask, weights);
    return layer_norm(add(e_seq, dropout(attended, params.dropout, mode, rng)), params.ln_g, params.ln_b);
}

Tensor ira(const Tensor& e_seq, std::span<const std::size_t> lengths, const ItemContext& ctx,
           const backbone::EmbeddingTable& table, const IraParams& params, const AdapterToggles& toggles, Mode mode,
           Rng& rng) {
    if (!toggles.ira || ctx.empty()) return e_seq;
    if (e_seq.rank() != 3 || ctx.rows() != e_seq.dim(0) || lengths.size() != e_seq.dim(0)) {
        throw ShapeError("ira: batch rows disagree between sequence and context");
    }
    const std::size_t B = e_seq.dim(0), W = e_seq.dim(1), C = ctx.capacity();

    // Rows without context get one placeholder slot so attention stays
    // defined; their output is discarded below.
    auto mask = ctx.mask();
    for (std::size_t b = 0; b < B; ++b) {
        if (ctx.count(b) == 0) mask[b * C] = 1;
    }
    const Tensor e_ctx = backbone::embed_sequence(table, ctx.ids(), B, C);
    const Tensor h_ctx = toggles.lft ? lft(e_ctx, params.lft, mode, rng) : e_ctx;

    Tensor adapted;
    if (toggles.cat) {
        adapted = cat(e_seq, h_ctx, mask, params.cat, mode, rng);
    } else {
        const Tensor avg = repeat_positions(masked_mean_slots(h_ctx, mask), W);
        adapted = layer_norm(add(e_seq, dropout(avg, params.cat.dropout, mode, rng)), params.cat.ln_g, params.cat.ln_b);
    }

    std::vector<std::uint8_t> take(B * W, 0);
    for (std::size_t b = 0; b < B; ++b) {
        if (ctx.count(b) == 0) continue;
        for (std::size_t c = W - std::min(W, lengths[b]); c < W; ++c) take[b * W + c] = 1;
    }
    return where_rows(adapted, e_seq, take);
}

}  // namespace adapter
ADARET_END_NAMESPACE
