// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-parameter moments. v stays elementwise non-negative; step counts updates.
struct AdamState {
    std::vector<Real> m;
    std::vector<Real> v;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update in place. Throws DivergedError on a
/// non-finite gradient.
void adam_step(std::span<Real> param, std::span<const Real> grad, AdamState& state, const AdamOptions& options);

/// Adam over a parameter list. Parameters whose group learning rate is zero
/// are left untouched (bit-for-bit).
class Adam {
   public:
    Adam() = default;
    Adam(std::vector<Tensor> params, AdamOptions options);

    /// Override the learning rate for parameters [begin, end).
    void set_lr(std::size_t begin, std::size_t end, double lr);

    void zero_grad();
    void step();

    std::size_t size() const { return params_.size(); }
    const AdamState& state(std::size_t i) const { return states_[i]; }

   private:
    std::vector<Tensor> params_;
    std::vector<AdamState> states_;
    std::vector<double> lr_;
    AdamOptions options_;
};

}  // namespace compute
ADARET_END_NAMESPACE
