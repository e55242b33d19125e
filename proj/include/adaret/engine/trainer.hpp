// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "adaret/compute/adam.hpp"
#include "adaret/data/batches.hpp"
#include "adaret/engine/model.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

/// What one training objective looks like.
struct Objective {
    int rounds = 1;
    double lambda = 1.0;
    config::AdapterToggles toggles = config::AdapterToggles::all_off();
    std::size_t k_ctx = 1;
    std::size_t n_neg = 1;
    bool full_vocab = false;
    bool exclude_target_ctx = false;

    /// Single round, adapters off, lambda = 1.
    static Objective pretrain(const config::TrainConfig& cfg);
    /// The configured rounds, decay and toggles.
    static Objective finetune(const config::TrainConfig& cfg);
};

/// Multi-round objective of one batch: for t = 1..T run a round, score the
/// target against negatives (resampled each round), add lambda^t L_t, then
/// grow both contexts. Per-round losses go to `round_losses` when given.
Tensor batch_objective(const Model& model, const data::Batch& batch, const Objective& objective, Mode mode, Rng& rng,
                       std::vector<double>* round_losses = nullptr);

/// One pass over `examples` with one Adam step per batch. Returns the mean
/// batch objective weighted by batch size. Throws DivergedError("diverged")
/// on a non-finite loss.
double train_epoch_ada(const Model& model, std::span<const data::Example> examples, const Objective& objective,
                       std::size_t batch_size, compute::Adam& optimizer, Rng& rng);

struct TrainHistory {
    std::vector<double> losses;    // per epoch
    std::vector<double> valid_hr;  // index 0 is the starting point
    int best_epoch = 0;
    double best_hr = 0;
    int epochs_run = 0;
    bool stopped_early = false;
};

struct TrainOutcome {
    Model model;
    TrainHistory history;
};

/// Called after every epoch with (epoch, loss, validation HR).
using EpochCallback = std::function<void(int, double, double)>;

/// Backbone-only training; keeps the parameters of the best validation HR
/// at eval_k (the initial state counts as epoch 0).
TrainOutcome pretrain(const data::SplitDataset& split, const config::TrainConfig& cfg,
                      const EpochCallback& on_epoch = {});

/// Joint training of backbone and adapters starting from `base` (or from a
/// fresh backbone when cfg.use_pretrained is false).
TrainOutcome finetune(const data::SplitDataset& split, const Checkpoint& base, const config::TrainConfig& cfg,
                      const EpochCallback& on_epoch = {});

/// Throws ConfigError naming the first field where `base` cannot seed a
/// model for `cfg` on a vocabulary of `num_items`.
void check_compatible(const Checkpoint& base, const config::TrainConfig& cfg, std::size_t num_items);

/// Shared early-stopping loop. `optimizer` must cover model.parameters().
TrainOutcome fit(Model model, const data::SplitDataset& split, const Objective& objective,
                 const config::TrainConfig& cfg, compute::Adam& optimizer, const EpochCallback& on_epoch);

}  // namespace engine
ADARET_END_NAMESPACE
