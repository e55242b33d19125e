// SPDX-License-Identifier: Apache-2.0
// Central-difference checks of every differentiable op. Double build only.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adaret/adapter/item_adapter.hpp"
#include "adaret/adapter/user_adapter.hpp"
#include "adaret/compute/fft.hpp"
#include "adaret/compute/grad_check.hpp"
#include "adaret/compute/gru.hpp"
#include "adaret/compute/ops.hpp"
#include "adaret/data/batches.hpp"
#include "adaret/engine/loss.hpp"
#include "adaret/engine/model.hpp"
#include "adaret/engine/trainer.hpp"
#include "test_support.hpp"

static_assert(sizeof(adaret::Real) == sizeof(double), "gradient checks need the double build");

namespace adaret::testing {

inline constexpr double kGradStep = 1e-5;
inline constexpr double kGradTolerance = 1e-4;

/// Keeps the worst report over several checks.
class GradAccumulator {
   public:
    void operator()(const std::function<compute::Tensor()>& loss, std::vector<compute::Tensor> params,
                    const std::string& what) {
        const auto r = compute::grad_check_report(loss, params, kGradStep);
        ++checks_;
        if (checks_ == 1 || r.max_rel_error > worst_.max_rel_error) {
            worst_ = r;
            where_ = what;
        }
    }
    const compute::GradCheckReport& worst() const { return worst_; }
    const std::string& where() const { return where_; }

   private:
    compute::GradCheckReport worst_;
    std::string where_;
    int checks_ = 0;
};

struct GradCase {
    std::string name;
    std::function<void(GradAccumulator&)> run;
};

namespace gradcheck_detail {

using namespace compute;

inline Tensor param(Shape shape, Rng& rng, double lo = -1, double hi = 1) {
    auto v = random_values<Real>(numel(shape), rng, lo, hi);
    return Tensor(std::move(shape), std::move(v), true);
}

// Contracts an output with fixed random weights so no gradient cancels by symmetry.
inline Tensor probe(const Tensor& out) {
    Rng rng(out.numel() * 7919 + 13);
    const Tensor w(out.shape(), random_values<Real>(out.numel(), rng));
    return sum(mul(out, w));
}

inline void elementwise(GradAccumulator& check) {
    Rng rng(71);
    auto a = param({3, 4}, rng), b = param({3, 4}, rng), row = param({4}, rng);
    check([&] { return probe(add(a, b)); }, {a, b}, "add");
    check([&] { return probe(sub(a, b)); }, {a, b}, "sub");
    check([&] { return probe(mul(a, b)); }, {a, b}, "mul");
    check([&] { return probe(add_bcast(a, row)); }, {a, row}, "add_bcast");
    check([&] { return probe(mul_bcast(a, row)); }, {a, row}, "mul_bcast");
    check([&] { return probe(scale(a, Real(-2.5))); }, {a}, "scale");
    check([&] { return mean(mul(a, a)); }, {a}, "mean");
    check([&] { return probe(reshape(a, {2, 6})); }, {a}, "reshape");
}

inline void activations(GradAccumulator& check) {
    Rng rng(72);
    auto x = param({5, 6}, rng, -2, 2);
    check([&] { return probe(relu(x)); }, {x}, "relu");
    check([&] { return probe(gelu(x)); }, {x}, "gelu");
    check([&] { return probe(compute::sigmoid(x)); }, {x}, "sigmoid");
    check([&] { return probe(compute::tanh(x)); }, {x}, "tanh");
}

inline void products(GradAccumulator& check) {
    Rng rng(73);
    auto x = param({2, 3, 4}, rng), w = param({4, 5}, rng), b = param({5}, rng);
    auto a = param({3, 4}, rng), c = param({6, 4}, rng);
    auto g = param({4}, rng), beta = param({4}, rng);
    check([&] { return probe(matmul(x, w)); }, {x, w}, "matmul");
    check([&] { return probe(dense(x, w, b)); }, {x, w, b}, "dense");
    check([&] { return probe(matmul_nt(a, c)); }, {a, c}, "matmul_nt");
    check([&] { return probe(layer_norm(x, g, beta)); }, {x, g, beta}, "layer_norm");
}

inline void attention_ops(GradAccumulator& check) {
    Rng rng(74);
    auto s = param({2, 3, 4}, rng, -2, 2);
    std::vector<std::uint8_t> mask(24, 1);
    mask[1] = mask[7] = mask[8] = mask[9] = 0;
    check([&] { return probe(masked_softmax(s, mask)); }, {s}, "masked_softmax");

    auto q = param({2, 3, 4}, rng), k = param({2, 5, 4}, rng), v = param({2, 5, 4}, rng);
    std::vector<std::uint8_t> amask(2 * 3 * 5, 1);
    for (std::size_t i = 0; i < amask.size(); i += 4) amask[i] = 0;
    check([&] { return probe(attention(q, k, v, 2, amask)); }, {q, k, v}, "attention");

    auto x = param({4, 5}, rng);
    check(
        [&] {
            Rng local(3);  // same mask on every call
            return probe(dropout(x, 0.4, Mode::train, local));
        },
        {x}, "dropout");
}

inline void gathers(GradAccumulator& check) {
    Rng rng(76);
    auto table = param({6, 3}, rng);
    const std::vector<int> ids{0, 2, 5, 2, 1, 0};
    check([&] { return probe(gather_rows(table, ids, {2, 3}, 0)); }, {table}, "gather_rows");

    auto x = param({2, 4, 3}, rng), y = param({2, 4, 3}, rng);
    const std::vector<std::size_t> pos{3, 1};
    check([&] { return probe(select_positions(x, pos)); }, {x}, "select_positions");
    check([&] { return probe(concat_last(x, y)); }, {x, y}, "concat_last");
    const std::vector<std::uint8_t> take{1, 0, 0, 1, 1, 1, 0, 1};
    check([&] { return probe(where_rows(x, y, take)); }, {x, y}, "where_rows");
    const std::vector<std::uint8_t> slots{1, 1, 0, 0, 0, 0, 0, 0};
    check([&] { return probe(masked_mean_slots(x, slots)); }, {x}, "masked_mean_slots");
    auto f = param({2, 3}, rng);
    check([&] { return probe(repeat_positions(f, 4)); }, {f}, "repeat_positions");
    const std::vector<int> scored{1, 4, 2, 3, 3, 5};
    check([&] { return probe(gather_scores(f, table, scored, 3)); }, {f, table}, "gather_scores");
}

inline void spectral(GradAccumulator& check) {
    Rng rng(77);
    for (std::size_t L : {4, 5, 8}) {
        const auto tag = " L=" + std::to_string(L);
        auto x = param({2, L, 3}, rng);
        check([&] { return probe(rfft(x).re); }, {x}, "rfft.re" + tag);
        check([&] { return probe(rfft(x).im); }, {x}, "rfft.im" + tag);
        const std::size_t bins = spectrum_bins(L);
        auto re = param({2, bins, 3}, rng), im = param({2, bins, 3}, rng);
        check([&] { return probe(irfft({re, im}, L)); }, {re, im}, "irfft" + tag);
        auto w_re = param({bins, 3}, rng), w_im = param({bins, 3}, rng);
        check([&] { return probe(spectral_filter(x, w_re, w_im)); }, {x, w_re, w_im}, "spectral_filter" + tag);
    }
}

inline void recurrence(GradAccumulator& check) {
    Rng rng(78);
    auto p = GruParams::init(3, 4, rng);
    for (auto* b : {&p.b_ir, &p.b_iz, &p.b_in, &p.b_hr, &p.b_hz, &p.b_hn}) *b = param({4}, rng, -0.5, 0.5);
    std::vector<Tensor> params{p.w_ir, p.w_iz, p.w_in, p.w_hr, p.w_hz, p.w_hn,
                               p.b_ir, p.b_iz, p.b_in, p.b_hr, p.b_hz, p.b_hn};
    auto x = param({2, 3, 3}, rng), h0 = param({2, 4}, rng);
    const std::vector<std::uint8_t> active{0, 1, 1, 1, 1, 0};
    params.push_back(x);
    params.push_back(h0);
    check([&] { return probe(gru_sequence(x, h0, p, active).final); }, params, "gru_sequence");
    auto step = param({2, 3}, rng);
    check([&] { return probe(gru_cell(step, h0, p)); }, {step, h0, p.w_in, p.b_hn}, "gru_cell");
}

inline void loss(GradAccumulator& check) {
    Rng rng(79);
    auto s = param({3, 4}, rng, -3, 3);
    check([&] { return engine::round_loss(s); }, {s}, "round_loss");
    auto a = param({}, rng), b = param({}, rng);
    const std::vector<Tensor> rounds{a, b};
    check([&] { return engine::total_loss(rounds, 0.5); }, {a, b}, "total_loss");
}

inline void adapters(GradAccumulator& check) {
    Rng rng(80);
    const std::size_t B = 2, W = 3, C = 4, d = 4;
    auto lftp = adapter::LftParams::init(C, d, 0.0);
    lftp.w_re = param({C / 2 + 1, d}, rng);
    lftp.w_im = param({C / 2 + 1, d}, rng);
    auto ctx = param({B, C, d}, rng);
    check(
        [&] {
            Rng local(1);
            return probe(adapter::lft(ctx, lftp, Mode::eval, local));
        },
        {ctx, lftp.w_re, lftp.w_im, lftp.ln_g, lftp.ln_b}, "lft");

    auto catp = adapter::CatParams::init(d, true, 0.0, rng);
    auto e = param({B, W, d}, rng);
    const std::vector<std::uint8_t> mask{1, 1, 0, 0, 1, 0, 0, 0};
    check(
        [&] {
            Rng local(1);
            return probe(adapter::cat(e, ctx, mask, catp, Mode::eval, local));
        },
        {e, ctx, catp.wq, catp.wk, catp.wv, catp.ln_g}, "cat");

    auto urap = adapter::UraParams::init(d, 0.0, rng);
    auto f = param({B, d}, rng), f1 = param({B, d}, rng), f2 = param({B, d}, rng);
    check(
        [&] {
            Rng local(1);
            adapter::UserContextStack stack;
            stack = adapter::extend_user_context(stack, f1);
            stack = adapter::extend_user_context(stack, f2);
            return probe(adapter::ura(f, stack, urap, config::AdapterToggles{}, Mode::eval, local));
        },
        {f, f1, f2, urap.w1, urap.b1, urap.w2, urap.gru.w_hz, urap.ln_b}, "ura");
}

/// The full two-round objective: batch 2, sequence length 4, d 8, k_ctx 2.
inline void objective(GradAccumulator& check, config::BackboneKind kind) {
    auto cfg = tiny_config(kind);
    cfg.rounds = 2;
    cfg.k_ctx = 2;
    cfg.max_len = 4;
    cfg.dim = 8;
    cfg.n_neg = 2;
    const engine::Model model(cfg, 12, 5);
    const std::vector<data::Example> ex{{0, {3, 1, 4, 2}, 5}, {1, {9, 2, 6, 8}, 7}};
    const auto batch = data::collate(ex, 4);
    const auto obj = engine::Objective::finetune(cfg);
    std::vector<Tensor> params;
    Rng noise(17);
    for (const auto& p : model.parameters()) {
        params.push_back(p.tensor);
        // An identity filter makes each position independent, leaving
        // earlier items with an exactly zero gradient; move off it.
        if (p.name.find(".filter.") != std::string::npos) {
            Tensor t = p.tensor;
            for (auto& v : t.data_mut()) v += static_cast<Real>(noise.uniform(-0.5, 0.5));
        }
    }
    check(
        [&] {
            Rng local(11);
            return engine::batch_objective(model, batch, obj, Mode::train, local);
        },
        params, std::string("objective/") + config::backbone_name(kind));
}

}  // namespace gradcheck_detail

inline std::vector<GradCase> gradient_cases() {
    namespace g = gradcheck_detail;
    using config::BackboneKind;
    return {
        {"elementwise and broadcast ops", g::elementwise},
        {"activations", g::activations},
        {"matrix products and layer norm", g::products},
        {"softmax, attention and dropout", g::attention_ops},
        {"gathers, selections and slot reductions", g::gathers},
        {"real FFT pair and spectral filter", g::spectral},
        {"GRU recurrence", g::recurrence},
        {"round and total loss", g::loss},
        {"item and user adapters", g::adapters},
        {"two-round objective, transformer", [](GradAccumulator& c) { g::objective(c, BackboneKind::transformer); }},
        {"two-round objective, GRU", [](GradAccumulator& c) { g::objective(c, BackboneKind::gru); }},
        {"two-round objective, filter MLP", [](GradAccumulator& c) { g::objective(c, BackboneKind::filter_mlp); }},
    };
}

}  // namespace adaret::testing
