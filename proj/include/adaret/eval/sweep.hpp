// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adaret/engine/trainer.hpp"
#include "adaret/eval/evaluate.hpp"

ADARET_BEGIN_NAMESPACE
namespace eval {

struct SweepGrid {
    std::vector<int> rounds{3, 4, 5, 6, 7, 8};
    std::vector<double> lambdas{0.1, 0.3, 0.5, 0.7, 0.9};

    /// Throws ConfigError for an empty axis, T < 1 or lambda outside (0, 1].
    void validate() const;
};

struct SweepRow {
    int rounds = 0;
    double lambda = 0;
    double hr = 0;
    double ndcg = 0;
    /// Empty on success; otherwise hr/ndcg are NaN.
    std::string error;
};

using Warn = std::function<void(const std::string&)>;

/// Finetunes from `base` and evaluates once per (T, lambda) cell in
/// Cartesian order (T outer). A failing cell becomes a NaN row and a warning.
std::vector<SweepRow> sweep(const data::SplitDataset& split, const engine::Checkpoint& base, const SweepGrid& grid,
                            const config::TrainConfig& cfg, data::Phase phase = data::Phase::test,
                            const Warn& warn = {});

/// CSV with header `T,lambda,hr,ndcg`; failed cells print `nan`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct AblationVariant {
    std::string label;
    config::TrainConfig config;
};

/// The seven single-component removals: w/o LFT, CAT, IRA, GRU, MLP, URA, PT.
std::vector<AblationVariant> ablation_variants(const config::TrainConfig& cfg);

/// Finetunes and evaluates every variant; each report carries its label.
std::vector<MetricReport> run_ablation(const data::SplitDataset& split, const engine::Checkpoint& base,
                                       const config::TrainConfig& cfg, data::Phase phase = data::Phase::test,
                                       const std::function<void(const MetricReport&)>& on_report = {});

}  // namespace eval
ADARET_END_NAMESPACE
