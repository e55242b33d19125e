// SPDX-License-Identifier: Apache-2.0
#include "adaret/eval/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

ADARET_BEGIN_NAMESPACE
namespace eval {

void SweepGrid::validate() const {
    if (rounds.empty() || lambdas.empty()) throw ConfigError("sweep grid: both axes need at least one value");
    for (int t : rounds) {
        if (t < 1) throw ConfigError("sweep grid: rounds must be at least 1");
    }
    for (double l : lambdas) {
        if (!(l > 0.0 && l <= 1.0)) throw ConfigError("sweep grid: lambda must lie in (0, 1]");
    }
}

std::vector<SweepRow> sweep(const data::SplitDataset& split, const engine::Checkpoint& base, const SweepGrid& grid,
                            const config::TrainConfig& cfg, data::Phase phase, const Warn& warn) {
    grid.validate();
    std::vector<SweepRow> rows;
    for (int t : grid.rounds) {
        for (double lambda : grid.lambdas) {
            SweepRow row;
            row.rounds = t;
            row.lambda = lambda;
            try {
                auto cell = cfg;
                cell.rounds = t;
                cell.lambda = lambda;
                auto outcome = engine::finetune(split, base, cell);
                const auto report = evaluate(outcome.model, split, phase, EvalSpec::from_config(cell));
                row.hr = report.hr;
                row.ndcg = report.ndcg;
            } catch (const Error& e) {
                row.hr = row.ndcg = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
                if (warn) warn("sweep cell T=" + std::to_string(t) + " lambda=" + std::to_string(lambda) +
                               " failed: " + e.what());
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "T,lambda,hr,ndcg\n";
    char buf[128];
    for (const auto& r : rows) {
        if (std::isnan(r.hr)) {
            std::snprintf(buf, sizeof buf, "%d,%g,nan,nan\n", r.rounds, r.lambda);
        } else {
            std::snprintf(buf, sizeof buf, "%d,%g,%.6f,%.6f\n", r.rounds, r.lambda, r.hr, r.ndcg);
        }
        out += buf;
    }
    return out;
}

std::vector<AblationVariant> ablation_variants(const config::TrainConfig& cfg) {
    std::vector<AblationVariant> out;
    auto add = [&](const char* label, auto&& edit) {
        auto c = cfg;
        edit(c);
        out.push_back({label, c});
    };
    add("w/o LFT", [](auto& c) { c.toggles.lft = false; });
    add("w/o CAT", [](auto& c) { c.toggles.cat = false; });
    add("w/o IRA", [](auto& c) { c.toggles.ira = false; });
    add("w/o GRU", [](auto& c) { c.toggles.ura_gru = false; });
    add("w/o MLP", [](auto& c) { c.toggles.ura_mlp = false; });
    add("w/o URA", [](auto& c) { c.toggles.ura = false; });
    add("w/o PT", [](auto& c) { c.use_pretrained = false; });
    return out;
}

std::vector<MetricReport> run_ablation(const data::SplitDataset& split, const engine::Checkpoint& base,
                                       const config::TrainConfig& cfg, data::Phase phase,
                                       const std::function<void(const MetricReport&)>& on_report) {
    std::vector<MetricReport> reports;
    for (const auto& v : ablation_variants(cfg)) {
        auto outcome = engine::finetune(split, base, v.config);
        auto report = evaluate(outcome.model, split, phase, EvalSpec::from_config(v.config));
        report.label = v.label;
        report.epoch = outcome.history.best_epoch;
        if (on_report) on_report(report);
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace eval
ADARET_END_NAMESPACE
