// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/trainer.hpp"

#include <cmath>

#include "adaret/compute/ops.hpp"
#include "adaret/engine/loss.hpp"
#include "adaret/engine/rounds.hpp"
#include "adaret/eval/evaluate.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

Objective Objective::pretrain(const config::TrainConfig& cfg) {
    Objective o;
    o.n_neg = static_cast<std::size_t>(cfg.n_neg);
    o.full_vocab = cfg.full_vocab;
    o.k_ctx = static_cast<std::size_t>(cfg.k_ctx);
    return o;
}

Objective Objective::finetune(const config::TrainConfig& cfg) {
    Objective o = pretrain(cfg);
    o.rounds = cfg.rounds;
    o.lambda = cfg.lambda;
    o.toggles = cfg.toggles;
    o.exclude_target_ctx = cfg.exclude_target_ctx;
    return o;
}

Tensor batch_objective(const Model& model, const data::Batch& batch, const Objective& objective, Mode mode, Rng& rng,
                       std::vector<double>* round_losses) {
    RoundState state = initial_state(batch.rows, model.config().context_capacity());
    std::vector<std::vector<int>> target_exclusion;
    if (objective.exclude_target_ctx) {
        for (int t : batch.targets) target_exclusion.push_back({t});
    }
    std::vector<Tensor> losses;
    for (int t = 1; t <= objective.rounds; ++t) {
        const Tensor f = forward_round(model, batch, state, objective.toggles, mode, rng).adapted;
        std::size_t per_row = 0;
        const auto ids = scoring_ids(batch, model.num_items(), objective.n_neg, objective.full_vocab, rng, per_row);
        losses.push_back(round_loss(compute::gather_scores(f, model.table.weight, ids, per_row)));
        if (round_losses) round_losses->push_back(losses.back().item());
        if (t == objective.rounds) break;
        // Selection is a hard top-k on current values; only the user stack carries gradient.
        if (objective.toggles.ira) {
            extend_item_context(state.items, f, model.table, objective.k_ctx, target_exclusion);
        }
        state.users = adapter::extend_user_context(std::move(state.users), f);
    }
    return total_loss(losses, objective.lambda);
}

double train_epoch_ada(const Model& model, std::span<const data::Example> examples, const Objective& objective,
                       std::size_t batch_size, compute::Adam& optimizer, Rng& rng) {
    const auto batches = data::make_batches(examples, static_cast<std::size_t>(model.config().max_len), batch_size, &rng);
    double weighted = 0;
    std::size_t rows = 0;
    for (const auto& batch : batches) {
        optimizer.zero_grad();
        const Tensor loss = batch_objective(model, batch, objective, Mode::train, rng);
        const double value = loss.item();
        if (!std::isfinite(value)) throw DivergedError("diverged");
        compute::backward(loss);
        optimizer.step();
        weighted += value * static_cast<double>(batch.rows);
        rows += batch.rows;
    }
    return rows ? weighted / static_cast<double>(rows) : 0.0;
}

namespace {

eval::MetricReport validation_report(const Model& model, const data::SplitDataset& split, const Objective& objective,
                     const config::TrainConfig& cfg) {
    eval::EvalSpec spec;
    spec.k = static_cast<std::size_t>(cfg.eval_k);
    spec.rounds = objective.rounds;
    spec.toggles = objective.toggles;
    spec.per_round = false;
    return eval::evaluate(model, split, data::Phase::valid, spec);
}

std::vector<Tensor> tensors_of(const ParamList& params) {
    std::vector<Tensor> out;
    for (const auto& p : params) out.push_back(p.tensor);
    return out;
}

}  // namespace

TrainOutcome fit(Model model, const data::SplitDataset& split, const Objective& objective,
                 const config::TrainConfig& cfg, compute::Adam& optimizer, const EpochCallback& on_epoch) {
    TrainHistory history;
    const auto examples = data::make_examples(split, data::Phase::train, cfg.augment);
    if (examples.empty() && cfg.epochs > 0) throw DataError("no training examples: sequences are too short");
    Rng rng(cfg.seed ^ 0x5deece66dULL);

    const auto initial = validation_report(model, split, objective, cfg);
    double best = initial.hr;
    double best_ndcg = initial.ndcg;
    history.valid_hr.push_back(best);
    auto best_state = model.snapshot();
    int since_best = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double loss =
            train_epoch_ada(model, examples, objective, static_cast<std::size_t>(cfg.batch_size), optimizer, rng);
        const auto report = validation_report(model, split, objective, cfg);
        const double hr = report.hr;
        history.losses.push_back(loss);
        history.valid_hr.push_back(hr);
        history.epochs_run = epoch;
        if (on_epoch) on_epoch(epoch, loss, hr);
        // HR decides; NDCG breaks exact ties so a saturated HR can still improve.
        if (hr > best || (hr == best && report.ndcg > best_ndcg)) {
            best = hr;
            best_ndcg = report.ndcg;
            history.best_epoch = epoch;
            best_state = model.snapshot();
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            history.stopped_early = true;
            break;
        }
    }
    history.best_hr = best;
    model.restore(best_state);
    return {std::move(model), std::move(history)};
}

TrainOutcome pretrain(const data::SplitDataset& split, const config::TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    Model model(cfg, split.num_items, cfg.seed);
    compute::Adam optimizer(tensors_of(model.phi()), {cfg.lr});
    return fit(std::move(model), split, Objective::pretrain(cfg), cfg, optimizer, on_epoch);
}

void check_compatible(const Checkpoint& base, const config::TrainConfig& cfg, std::size_t num_items) {
    auto mismatch = [](const std::string& field, const std::string& have, const std::string& want) {
        throw ConfigError(field + ": checkpoint has " + have + ", config has " + want);
    };
    const auto& b = base.config;
    if (base.phase != "pretrained") mismatch("phase", base.phase, "pretrained");
    if (b.dim != cfg.dim) mismatch("dim", std::to_string(b.dim), std::to_string(cfg.dim));
    if (b.max_len != cfg.max_len) mismatch("max_len", std::to_string(b.max_len), std::to_string(cfg.max_len));
    if (b.backbone != cfg.backbone) mismatch("backbone", config::backbone_name(b.backbone), config::backbone_name(cfg.backbone));
    if (b.blocks != cfg.blocks) mismatch("blocks", std::to_string(b.blocks), std::to_string(cfg.blocks));
    if (b.heads != cfg.heads) mismatch("heads", std::to_string(b.heads), std::to_string(cfg.heads));
    if (base.num_items != num_items) {
        mismatch("num_items", std::to_string(base.num_items), std::to_string(num_items));
    }
}

TrainOutcome finetune(const data::SplitDataset& split, const Checkpoint& base, const config::TrainConfig& cfg,
                      const EpochCallback& on_epoch) {
    cfg.validate();
    check_compatible(base, cfg, split.num_items);
    // Adapter parameters draw from their own stream so they do not depend on
    // whether the backbone is restored.
    Model model(cfg, split.num_items, cfg.seed + 1);
    if (cfg.use_pretrained) model.restore(base.tensors, true);
    compute::Adam optimizer(tensors_of(model.parameters()), {cfg.lr});
    auto outcome = fit(std::move(model), split, Objective::finetune(cfg), cfg, optimizer, on_epoch);
    return outcome;
}

}  // namespace engine
ADARET_END_NAMESPACE
