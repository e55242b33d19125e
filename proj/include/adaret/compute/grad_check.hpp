// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>

#include "adaret/compute/tensor.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

struct GradCheckReport {
    double max_rel_error = 0;
    std::size_t worst_param = 0;
    std::size_t worst_index = 0;
    double analytic = 0;
    double numeric = 0;
};

/// Compares backward() against central differences for every entry of every
/// parameter. `loss` must rebuild the graph from the current parameter values
/// on each call. Per entry the error is
///   |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
/// and the maximum is reported. Meaningful only in the double build.
GradCheckReport grad_check_report(const std::function<Tensor()>& loss, std::span<const Tensor> params, double h);

inline double grad_check(const std::function<Tensor()>& loss, std::span<const Tensor> params, double h) {
    return grad_check_report(loss, params, h).max_rel_error;
}

}  // namespace compute
ADARET_END_NAMESPACE
