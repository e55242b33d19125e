// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace adaret::acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_seconds;  // 0 = no stated limit
    std::function<Outcome()> run;
};

// Double-precision translation unit.
Outcome gradient_oracle();

// Single-precision translation unit.
Outcome numerical_suite();
Outcome base_equivalence();
Outcome overfit_check();
Outcome multi_round_benefit();
Outcome metric_oracles();
Outcome data_pipeline();
Outcome retrieval_contract();
Outcome determinism();
Outcome ablation_harness();

}  // namespace adaret::acceptance
