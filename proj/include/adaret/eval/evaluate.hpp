// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "adaret/data/batches.hpp"
#include "adaret/engine/model.hpp"
#include "adaret/engine/retrieval.hpp"

ADARET_BEGIN_NAMESPACE
namespace eval {

/// Metrics over the first t*K/T items of the ranked lists.
struct RoundMetric {
    int t = 0;
    std::size_t size = 0;
    double hr = 0;
    double ndcg = 0;
};

struct MetricReport {
    std::string label;
    std::string split;
    std::size_t k = 0;
    double hr = 0;
    double ndcg = 0;
    std::vector<RoundMetric> per_round;
    int epoch = 0;
    std::string config_hash;
    /// Measured but kept out of the JSON line so reports stay reproducible.
    double wall_seconds = 0;
};

struct EvalSpec {
    std::size_t k = 50;
    int rounds = 1;
    config::AdapterToggles toggles = config::AdapterToggles::all_off();
    bool per_round = true;
    std::size_t batch_size = 256;

    /// The model's own rounds and toggles with K = eval_k.
    static EvalSpec from_config(const config::TrainConfig& cfg);
};

/// Full-candidate leave-one-out evaluation. Candidates are all items outside
/// the user's input history; the rank of the target is its position in the
/// retrieved list.
MetricReport evaluate(const engine::Model& model, const data::SplitDataset& split, data::Phase phase,
                      const EvalSpec& spec);

/// Same, also returning the ranked lists in user order.
MetricReport evaluate(const engine::Model& model, const data::SplitDataset& split, data::Phase phase,
                      const EvalSpec& spec, std::vector<engine::RetrievalResult>* lists);

/// One JSON object, no trailing newline.
std::string to_json_line(const MetricReport& report);

}  // namespace eval
ADARET_END_NAMESPACE
