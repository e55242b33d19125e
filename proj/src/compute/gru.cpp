// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/gru.hpp"

#include <algorithm>
#include <functional>

#include "adaret/compute/init.hpp"
#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

GruParams GruParams::init(std::size_t input, std::size_t hidden, Rng& rng) {
    GruParams p;
    p.w_ir = fan_in_param({input, hidden}, hidden, rng);
    p.w_iz = fan_in_param({input, hidden}, hidden, rng);
    p.w_in = fan_in_param({input, hidden}, hidden, rng);
    p.w_hr = fan_in_param({hidden, hidden}, hidden, rng);
    p.w_hz = fan_in_param({hidden, hidden}, hidden, rng);
    p.w_hn = fan_in_param({hidden, hidden}, hidden, rng);
    for (Tensor* b : {&p.b_ir, &p.b_iz, &p.b_in, &p.b_hr, &p.b_hz, &p.b_hn}) *b = constant_param({hidden}, 0);
    return p;
}

void GruParams::collect(const std::string& prefix, ParamList& out) const {
    out.push_back({prefix + ".w_ir", w_ir});
    out.push_back({prefix + ".w_iz", w_iz});
    out.push_back({prefix + ".w_in", w_in});
    out.push_back({prefix + ".w_hr", w_hr});
    out.push_back({prefix + ".w_hz", w_hz});
    out.push_back({prefix + ".w_hn", w_hn});
    out.push_back({prefix + ".b_ir", b_ir});
    out.push_back({prefix + ".b_iz", b_iz});
    out.push_back({prefix + ".b_in", b_in});
    out.push_back({prefix + ".b_hr", b_hr});
    out.push_back({prefix + ".b_hz", b_hz});
    out.push_back({prefix + ".b_hn", b_hn});
}

namespace {

struct InputProjection {
    Tensor r, z, n;  // each [B, hidden], biases included
};

Tensor step(const InputProjection& xp, const Tensor& h, const GruParams& p) {
    const Tensor r = sigmoid(add(xp.r, dense(h, p.w_hr, p.b_hr)));
    const Tensor z = sigmoid(add(xp.z, dense(h, p.w_hz, p.b_hz)));
    const Tensor n = tanh(add(xp.n, mul(r, dense(h, p.w_hn, p.b_hn))));
    // (1 - z) * n + z * h == n + z * (h - n)
    return add(n, mul(z, sub(h, n)));
}

void check_state(const Tensor& h, std::size_t batch, const GruParams& p) {
    if (h.rank() != 2 || h.dim(0) != batch || h.dim(1) != p.hidden_dim()) {
        throw ShapeError("gru: hidden state " + to_string(h.shape()) + " incompatible with batch " +
                         std::to_string(batch) + " and hidden size " + std::to_string(p.hidden_dim()));
    }
}

GruOutput run(std::size_t steps, std::size_t batch, const Tensor& h0, const GruParams& params,
              std::span<const std::uint8_t> active, const std::function<InputProjection(std::size_t)>& project) {
    check_state(h0, batch, params);
    if (!active.empty() && active.size() != steps * batch) throw ShapeError("gru: activity mask size mismatch");
    GruOutput out;
    Tensor h = h0;
    for (std::size_t t = 0; t < steps; ++t) {
        const auto row_active = active.empty() ? std::span<const std::uint8_t>{} : active.subspan(t * batch, batch);
        bool any = row_active.empty();
        bool all = row_active.empty();
        if (!row_active.empty()) {
            any = std::any_of(row_active.begin(), row_active.end(), [](auto a) { return a != 0; });
            all = std::all_of(row_active.begin(), row_active.end(), [](auto a) { return a != 0; });
        }
        if (any) {
            Tensor next = step(project(t), h, params);
            h = all ? next : where_rows(next, h, row_active);
        }
        out.states.push_back(h);
    }
    out.final = h;
    return out;
}

}  // namespace

Tensor gru_cell(const Tensor& x, const Tensor& h, const GruParams& params) {
    if (x.rank() != 2 || x.dim(1) != params.input_dim()) {
        throw ShapeError("gru_cell: input " + to_string(x.shape()) + " incompatible with input size " +
                         std::to_string(params.input_dim()));
    }
    check_state(h, x.dim(0), params);
    const InputProjection xp{dense(x, params.w_ir, params.b_ir), dense(x, params.w_iz, params.b_iz),
                             dense(x, params.w_in, params.b_in)};
    return step(xp, h, params);
}

GruOutput gru_sequence(std::span<const Tensor> inputs, const Tensor& h0, const GruParams& params,
                       std::span<const std::uint8_t> active) {
    const std::size_t batch = h0.rank() == 2 ? h0.dim(0) : 0;
    for (const auto& x : inputs) {
        if (x.rank() != 2 || x.dim(0) != batch || x.dim(1) != params.input_dim()) {
            throw ShapeError("gru_sequence: step input " + to_string(x.shape()) + " incompatible with parameters");
        }
    }
    return run(inputs.size(), batch, h0, params, active, [&](std::size_t t) {
        return InputProjection{dense(inputs[t], params.w_ir, params.b_ir), dense(inputs[t], params.w_iz, params.b_iz),
                               dense(inputs[t], params.w_in, params.b_in)};
    });
}

GruOutput gru_sequence(const Tensor& inputs, const Tensor& h0, const GruParams& params,
                       std::span<const std::uint8_t> active) {
    if (inputs.rank() != 3 || inputs.dim(2) != params.input_dim()) {
        throw ShapeError("gru_sequence: input " + to_string(inputs.shape()) + " incompatible with input size " +
                         std::to_string(params.input_dim()));
    }
    const std::size_t B = inputs.dim(0), L = inputs.dim(1);
    const Tensor pr = dense(inputs, params.w_ir, params.b_ir);
    const Tensor pz = dense(inputs, params.w_iz, params.b_iz);
    const Tensor pn = dense(inputs, params.w_in, params.b_in);
    return run(L, B, h0, params, active, [&](std::size_t t) {
        const std::vector<std::size_t> pos(B, t);
        return InputProjection{select_positions(pr, pos), select_positions(pz, pos), select_positions(pn, pos)};
    });
}

}  // namespace compute
ADARET_END_NAMESPACE
