// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/grad_check.hpp"

#include <algorithm>
#include <cmath>

ADARET_BEGIN_NAMESPACE
namespace compute {

GradCheckReport grad_check_report(const std::function<Tensor()>& loss, std::span<const Tensor> params, double h) {
    const auto analytic = gradients(loss(), params);
    GradCheckReport report;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor param = params[p];
        auto values = param.data_mut();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const Real saved = values[i];
            double plus = 0, minus = 0;
            {
                NoGradGuard no_grad;
                values[i] = static_cast<Real>(saved + h);
                plus = loss().item();
                values[i] = static_cast<Real>(saved - h);
                minus = loss().item();
            }
            values[i] = saved;
            const double numeric = (plus - minus) / (2.0 * h);
            const double a = analytic[p][i];
            const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
            if (err > report.max_rel_error) report = {err, p, i, a, numeric};
        }
    }
    return report;
}

}  // namespace compute
ADARET_END_NAMESPACE
