// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "adaret/compute/adam.hpp"
#include "adaret/compute/gru.hpp"
#include "adaret/compute/ops.hpp"
#include "test_support.hpp"

using namespace adaret;
using namespace adaret::compute;
using Catch::Approx;

namespace {

double sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Affine map of one row: x W + b, all in double.
std::vector<double> affine(std::span<const Real> x, const Tensor& w, const Tensor& b) {
    const std::size_t in = w.dim(0), out = w.dim(1);
    std::vector<double> y(out);
    for (std::size_t j = 0; j < out; ++j) {
        double acc = b[j];
        for (std::size_t i = 0; i < in; ++i) acc += double(x[i]) * double(w[i * out + j]);
        y[j] = acc;
    }
    return y;
}

std::vector<double> reference_cell(std::span<const Real> x, std::span<const Real> h, const GruParams& p) {
    const auto xr = affine(x, p.w_ir, p.b_ir), hr = affine(h, p.w_hr, p.b_hr);
    const auto xz = affine(x, p.w_iz, p.b_iz), hz = affine(h, p.w_hz, p.b_hz);
    const auto xn = affine(x, p.w_in, p.b_in), hn = affine(h, p.w_hn, p.b_hn);
    std::vector<double> out(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double r = sig(xr[j] + hr[j]);
        const double z = sig(xz[j] + hz[j]);
        const double n = std::tanh(xn[j] + r * hn[j]);
        out[j] = (1 - z) * n + z * h[j];
    }
    return out;
}

GruParams randomized(std::size_t in, std::size_t hidden, Rng& rng) {
    auto p = GruParams::init(in, hidden, rng);
    // Non-zero biases so every term of the cell is exercised.
    for (auto* b : {&p.b_ir, &p.b_iz, &p.b_in, &p.b_hr, &p.b_hz, &p.b_hn})
        for (auto& v : b->data_mut()) v = static_cast<Real>(rng.uniform(-0.5, 0.5));
    return p;
}

}  // namespace

TEST_CASE("GRU cell matches the gate equations", "[gru]") {
    Rng rng(21);
    const std::size_t B = 3, in = 4, hidden = 5;
    const auto p = randomized(in, hidden, rng);
    const Tensor x({B, in}, testing::random_values<Real>(B * in, rng));
    const Tensor h({B, hidden}, testing::random_values<Real>(B * hidden, rng));
    const auto out = gru_cell(x, h, p);
    for (std::size_t b = 0; b < B; ++b) {
        const auto ref = reference_cell(x.data().subspan(b * in, in), h.data().subspan(b * hidden, hidden), p);
        for (std::size_t j = 0; j < hidden; ++j) CHECK(out[b * hidden + j] == Approx(ref[j]).margin(1e-5));
    }
}

TEST_CASE("GRU sequence carries state through inactive steps", "[gru]") {
    Rng rng(22);
    const std::size_t B = 2, L = 3, in = 2, hidden = 3;
    const auto p = randomized(in, hidden, rng);
    const Tensor x({B, L, in}, testing::random_values<Real>(B * L * in, rng));
    const auto h0 = Tensor::zeros({B, hidden});
    // Step-major activity: row 1 skips the first step.
    const std::vector<std::uint8_t> active{1, 0, 1, 1, 1, 1};
    const auto out = gru_sequence(x, h0, p, active);
    REQUIRE(out.states.size() == L);
    for (std::size_t j = 0; j < hidden; ++j) CHECK(out.states[0][hidden + j] == Real(0));

    // Row 1 must equal a plain run over its last two inputs.
    std::vector<Real> h(hidden, Real(0));
    for (std::size_t t = 1; t < L; ++t) {
        const auto next = reference_cell(x.data().subspan((L + t) * in, in), h, p);
        for (std::size_t j = 0; j < hidden; ++j) h[j] = static_cast<Real>(next[j]);
    }
    for (std::size_t j = 0; j < hidden; ++j) CHECK(out.final[hidden + j] == Approx(h[j]).margin(1e-5));

    // The list form agrees with the batched form.
    std::vector<Tensor> steps;
    for (std::size_t t = 0; t < L; ++t) {
        std::vector<Real> v(B * in);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t c = 0; c < in; ++c) v[b * in + c] = x[(b * L + t) * in + c];
        steps.emplace_back(Shape{B, in}, v);
    }
    const auto listed = gru_sequence(steps, h0, p, active);
    for (std::size_t i = 0; i < B * hidden; ++i) CHECK(listed.final[i] == Approx(out.final[i]).margin(1e-6));
    CHECK(gru_sequence(std::span<const Tensor>{}, h0, p).final.data()[0] == Real(0));
}

TEST_CASE("Adam follows the bias-corrected update", "[adam]") {
    std::vector<Real> param{Real(1), Real(-2)};
    const std::vector<Real> grad{Real(0.5), Real(-1)};
    AdamState state;
    AdamOptions opt;
    opt.lr = 0.1;
    double m[2] = {0, 0}, v[2] = {0, 0}, ref[2] = {1, -2};
    for (int step = 1; step <= 3; ++step) {
        adam_step(param, grad, state, opt);
        for (int i = 0; i < 2; ++i) {
            m[i] = 0.9 * m[i] + 0.1 * grad[i];
            v[i] = 0.999 * v[i] + 0.001 * grad[i] * grad[i];
            const double mh = m[i] / (1 - std::pow(0.9, step));
            const double vh = v[i] / (1 - std::pow(0.999, step));
            ref[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
        }
    }
    CHECK(state.step == 3);
    CHECK(param[0] == Approx(ref[0]).margin(1e-5));
    CHECK(param[1] == Approx(ref[1]).margin(1e-5));
    for (const auto x : state.v) CHECK(x >= 0);
}

TEST_CASE("Adam rejects non-finite gradients without touching parameters", "[adam]") {
    Tensor a({2}, {Real(1), Real(2)}, true);
    Tensor b({1}, {Real(3)}, true);
    Adam opt({a, b}, {});
    a.grad_mut()[0] = Real(1);
    b.grad_mut()[0] = std::numeric_limits<Real>::quiet_NaN();
    REQUIRE_THROWS_AS(opt.step(), DivergedError);
    CHECK(a[0] == Real(1));
    CHECK(b[0] == Real(3));
}

TEST_CASE("Adam leaves zero-learning-rate groups bit-identical", "[adam]") {
    Tensor a({2}, {Real(1), Real(2)}, true);
    Tensor b({2}, {Real(3), Real(4)}, true);
    Adam opt({a, b}, {0.05});
    opt.set_lr(1, 2, 0.0);
    const auto loss = sum(add(mul(a, a), mul(b, b)));
    opt.zero_grad();
    backward(loss);
    opt.step();
    CHECK(a[0] != Real(1));
    CHECK(b[0] == Real(3));
    CHECK(b[1] == Real(4));
}
