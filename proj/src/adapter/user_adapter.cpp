// SPDX-License-Identifier: Apache-2.0
#include "adaret/adapter/user_adapter.hpp"

#include "adaret/compute/init.hpp"

ADARET_BEGIN_NAMESPACE
namespace adapter {

using namespace compute;

UraParams UraParams::init(std::size_t dim, double dropout, Rng& rng) {
    UraParams p;
    p.gru = GruParams::init(dim, dim, rng);
    p.w1 = fan_in_param({2 * dim, dim}, 2 * dim, rng);
    p.b1 = constant_param({dim}, 0);
    p.w2 = fan_in_param({dim, dim}, dim, rng);
    p.b2 = constant_param({dim}, 0);
    p.ln_g = constant_param({dim}, 1);
    p.ln_b = constant_param({dim}, 0);
    p.dropout = dropout;
    return p;
}

void UraParams::collect(ParamList& out) const {
    gru.collect("adapter.ura.gru.", out);
    out.push_back({"adapter.ura.mlp.w1", w1});
    out.push_back({"adapter.ura.mlp.b1", b1});
    out.push_back({"adapter.ura.mlp.w2", w2});
    out.push_back({"adapter.ura.mlp.b2", b2});
    out.push_back({"adapter.ura.ln.gamma", ln_g});
    out.push_back({"adapter.ura.ln.beta", ln_b});
}

Tensor summarize_stack(const UserContextStack& stack, std::size_t rows, const UraParams& params,
                       const AdapterToggles& toggles) {
    const std::size_t d = params.w2.dim(0);
    if (stack.empty()) return Tensor::zeros({rows, d});
    for (const auto& v : stack.entries) require_shape(v, {rows, d}, "user context entry");
    if (toggles.ura_gru) return gru_sequence(stack.entries, Tensor::zeros({rows, d}), params.gru).final;
    Tensor total = stack.entries.front();
    for (std::size_t i = 1; i < stack.size(); ++i) total = add(total, stack.entries[i]);
    return stack.size() == 1 ? total : scale(total, Real(1) / static_cast<Real>(stack.size()));
}

Tensor ura(const Tensor& f, const UserContextStack& stack, const UraParams& params, const AdapterToggles& toggles,
           Mode mode, Rng& rng) {
    if (!toggles.ura) return f;
    if (f.rank() != 2 || f.dim(1) != params.w2.dim(0)) {
        throw ShapeError("ura: user vectors " + to_string(f.shape()) + " do not match adapter width");
    }
    const Tensor summary = summarize_stack(stack, f.dim(0), params, toggles);
    if (!toggles.ura_mlp) return layer_norm(add(f, summary), params.ln_g, params.ln_b);
    const Tensor hidden = relu(dense(concat_last(summary, f), params.w1, params.b1));
    const Tensor fused = dense(hidden, params.w2, params.b2);
    return layer_norm(add(f, dropout(fused, params.dropout, mode, rng)), params.ln_g, params.ln_b);
}

}  // namespace adapter
ADARET_END_NAMESPACE
