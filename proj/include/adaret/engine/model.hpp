// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "adaret/adapter/item_adapter.hpp"
#include "adaret/adapter/user_adapter.hpp"
#include "adaret/backbone/embedding.hpp"
#include "adaret/backbone/encoder.hpp"
#include "adaret/engine/config.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

using compute::Mode;
using compute::NamedTensor;
using compute::ParamList;
using compute::Tensor;

/// Parameter values detached from any model, keyed by name.
struct TensorRecord {
    std::string name;
    compute::Shape shape;
    std::vector<Real> values;
};

/// Everything needed to rebuild a model: config echo, vocabulary size and
/// every parameter tensor. `phase` is "pretrained" or "finetuned".
struct Checkpoint {
    std::string phase = "pretrained";
    config::TrainConfig config;
    std::size_t num_items = 0;
    int epoch = 0;
    std::vector<TensorRecord> tensors;

    const TensorRecord* find(const std::string& name) const;
};

/// Backbone-side parameters (embedding table + encoder) form the Phi group;
/// adapter parameters form the Theta group.
class Model {
   public:
    /// Fresh parameters drawn from `rng` in a fixed order.
    Model(const config::TrainConfig& cfg, std::size_t num_items, Rng& rng);
    Model(const config::TrainConfig& cfg, std::size_t num_items, Rng&& rng);
    Model(const config::TrainConfig& cfg, std::size_t num_items, std::uint64_t seed);

    Model(Model&&) noexcept = default;
    Model& operator=(Model&&) noexcept = default;

    const config::TrainConfig& config() const { return config_; }
    std::size_t num_items() const { return num_items_; }
    std::size_t dim() const { return table.dim(); }

    ParamList phi() const;
    ParamList theta() const;
    /// phi() followed by theta().
    ParamList parameters() const;

    /// Value copy of every parameter.
    std::vector<TensorRecord> snapshot() const;
    /// Writes values back by name. Throws CheckpointError("missing tensor ...")
    /// when a parameter is absent and on shape disagreement. With
    /// `phi_only` the adapter parameters are left as they are.
    void restore(std::span<const TensorRecord> records, bool phi_only = false);

    Checkpoint to_checkpoint(const std::string& phase, int epoch) const;
    static Model from_checkpoint(const Checkpoint& ckpt);

    backbone::EmbeddingTable table;
    std::unique_ptr<backbone::SequenceEncoder> encoder;
    adapter::IraParams ira;
    adapter::UraParams ura;

   private:
    config::TrainConfig config_;
    std::size_t num_items_ = 0;
};

}  // namespace engine
ADARET_END_NAMESPACE
