// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "adaret/compute/tensor.hpp"
#include "adaret/rng.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

/// Trainable tensor with entries drawn from U(-bound, bound).
inline Tensor uniform_param(Shape shape, double bound, Rng& rng) {
    std::vector<Real> values(numel(shape));
    for (auto& v : values) v = static_cast<Real>(rng.uniform(-bound, bound));
    return Tensor(std::move(shape), std::move(values), true);
}

/// Uniform with bound 1/sqrt(fan_in).
inline Tensor fan_in_param(Shape shape, std::size_t fan_in, Rng& rng) {
    return uniform_param(std::move(shape), 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
}

inline Tensor constant_param(Shape shape, Real value) { return Tensor::full(std::move(shape), value, true); }

}  // namespace compute
ADARET_END_NAMESPACE
