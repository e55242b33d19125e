// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/adam.hpp"

#include <cmath>

ADARET_BEGIN_NAMESPACE
namespace compute {

void adam_step(std::span<Real> param, std::span<const Real> grad, AdamState& state, const AdamOptions& options) {
    if (grad.size() != param.size()) throw ShapeError("adam_step: gradient size does not match parameter");
    if (!(options.lr > 0)) throw ConfigError("adam_step: learning rate must be positive");
    require_finite(grad, "adam_step gradient");
    if (state.m.size() != param.size()) {
        state.m.assign(param.size(), Real(0));
        state.v.assign(param.size(), Real(0));
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(options.beta1, t);
    const double bc2 = 1.0 - std::pow(options.beta2, t);
    const Real b1 = static_cast<Real>(options.beta1);
    const Real b2 = static_cast<Real>(options.beta2);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const Real g = grad[i];
        state.m[i] = b1 * state.m[i] + (Real(1) - b1) * g;
        state.v[i] = b2 * state.v[i] + (Real(1) - b2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        param[i] -= static_cast<Real>(options.lr * m_hat / (std::sqrt(v_hat) + options.eps));
    }
}

Adam::Adam(std::vector<Tensor> params, AdamOptions options)
    : params_(std::move(params)), states_(params_.size()), lr_(params_.size(), options.lr), options_(options) {}

void Adam::set_lr(std::size_t begin, std::size_t end, double lr) {
    for (std::size_t i = begin; i < end && i < lr_.size(); ++i) lr_[i] = lr;
}

void Adam::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

void Adam::step() {
    // Check everything first so a diverged batch leaves all parameters untouched.
    for (auto& p : params_) {
        if (!p.grad().empty()) require_finite(p.grad(), "adam gradient");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (lr_[i] == 0.0) continue;
        auto& p = params_[i];
        AdamOptions opts = options_;
        opts.lr = lr_[i];
        const auto g = p.grad_mut();
        adam_step(p.data_mut(), g, states_[i], opts);
    }
}

}  // namespace compute
ADARET_END_NAMESPACE
