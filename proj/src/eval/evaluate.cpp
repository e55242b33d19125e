// SPDX-License-Identifier: Apache-2.0
#include "adaret/eval/evaluate.hpp"

#include <chrono>

#include "adaret/eval/metrics.hpp"
#include "json.hpp"

ADARET_BEGIN_NAMESPACE
namespace eval {

EvalSpec EvalSpec::from_config(const config::TrainConfig& cfg) {
    EvalSpec s;
    s.k = static_cast<std::size_t>(cfg.eval_k);
    s.rounds = cfg.rounds;
    s.toggles = cfg.toggles;
    return s;
}

MetricReport evaluate(const engine::Model& model, const data::SplitDataset& split, data::Phase phase,
                      const EvalSpec& spec) {
    return evaluate(model, split, phase, spec, nullptr);
}

MetricReport evaluate(const engine::Model& model, const data::SplitDataset& split, data::Phase phase,
                      const EvalSpec& spec, std::vector<engine::RetrievalResult>* lists) {
    const auto start = std::chrono::steady_clock::now();
    const auto examples = data::make_examples(split, phase);
    if (examples.empty()) throw DataError(std::string("no users to evaluate on the ") + data::phase_name(phase) + " split");
    const auto batches = data::make_batches(examples, static_cast<std::size_t>(model.config().max_len),
                                            spec.batch_size);
    const engine::RetrievalSpec rspec{spec.k, spec.rounds, spec.toggles};
    std::vector<std::vector<int>> ranked;
    std::vector<int> targets;
    if (lists) lists->clear();
    for (const auto& batch : batches) {
        auto results = engine::retrieve_batch(model, batch, rspec);
        for (std::size_t b = 0; b < batch.rows; ++b) {
            ranked.push_back(results[b].items);
            targets.push_back(batch.targets[b]);
            if (lists) lists->push_back(std::move(results[b]));
        }
    }

    MetricReport r;
    r.split = data::phase_name(phase);
    r.k = spec.k;
    const auto k = static_cast<long>(spec.k);
    r.hr = metrics::hr_at_k(ranked, targets, k);
    r.ndcg = metrics::ndcg_at_k(ranked, targets, k);
    if (spec.per_round) {
        const std::size_t per = spec.k / static_cast<std::size_t>(spec.rounds);
        for (int t = 1; t <= spec.rounds; ++t) {
            const auto size = per * static_cast<std::size_t>(t);
            const auto kk = static_cast<long>(size);
            r.per_round.push_back({t, size, metrics::hr_at_k(ranked, targets, kk), metrics::ndcg_at_k(ranked, targets, kk)});
        }
    }
    r.config_hash = config::config_hash(model.config());
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string to_json_line(const MetricReport& r) {
    nlohmann::ordered_json j;
    if (!r.label.empty()) j["label"] = r.label;
    j["split"] = r.split;
    j["k"] = r.k;
    j["hr"] = r.hr;
    j["ndcg"] = r.ndcg;
    auto& rounds = j["per_round"] = nlohmann::ordered_json::array();
    for (const auto& m : r.per_round) {
        rounds.push_back(nlohmann::ordered_json{{"t", m.t}, {"size", m.size}, {"hr", m.hr}, {"ndcg", m.ndcg}});
    }
    j["epoch"] = r.epoch;
    j["config_hash"] = r.config_hash;
    return j.dump();
}

}  // namespace eval
ADARET_END_NAMESPACE
