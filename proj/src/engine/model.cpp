// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/model.hpp"

#include <unordered_map>

ADARET_BEGIN_NAMESPACE
namespace engine {

const TensorRecord* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

Model::Model(const config::TrainConfig& cfg, std::size_t num_items, Rng& rng) : config_(cfg), num_items_(num_items) {
    cfg.validate();
    const auto d = static_cast<std::size_t>(cfg.dim);
    table = backbone::EmbeddingTable::init(num_items, d, rng);
    encoder = backbone::make_encoder(cfg.backbone, backbone::EncoderOptions::from_config(cfg), rng);
    ira.lft = adapter::LftParams::init(cfg.context_capacity(), d, cfg.dropout);
    ira.cat = adapter::CatParams::init(d, cfg.ctx_projections, cfg.dropout, rng);
    ura = adapter::UraParams::init(d, cfg.dropout, rng);
}

Model::Model(const config::TrainConfig& cfg, std::size_t num_items, std::uint64_t seed)
    : Model(cfg, num_items, Rng(seed)) {}

Model::Model(const config::TrainConfig& cfg, std::size_t num_items, Rng&& rng) : Model(cfg, num_items, rng) {}

ParamList Model::phi() const {
    ParamList out{{"embedding.items", table.weight}};
    encoder->collect(out);
    return out;
}

ParamList Model::theta() const {
    ParamList out;
    ira.collect(out);
    ura.collect(out);
    return out;
}

ParamList Model::parameters() const {
    auto out = phi();
    for (auto& p : theta()) out.push_back(std::move(p));
    return out;
}

std::vector<TensorRecord> Model::snapshot() const {
    std::vector<TensorRecord> out;
    for (const auto& p : parameters()) {
        out.push_back({p.name, p.tensor.shape(), std::vector<Real>(p.tensor.data().begin(), p.tensor.data().end())});
    }
    return out;
}

void Model::restore(std::span<const TensorRecord> records, bool phi_only) {
    std::unordered_map<std::string, const TensorRecord*> by_name;
    for (const auto& r : records) by_name.emplace(r.name, &r);
    for (auto& p : phi_only ? phi() : parameters()) {
        const auto it = by_name.find(p.name);
        if (it == by_name.end()) throw CheckpointError("missing tensor '" + p.name + "'");
        const auto& rec = *it->second;
        if (rec.shape != p.tensor.shape()) {
            throw CheckpointError("tensor '" + p.name + "' has shape " + compute::to_string(rec.shape) +
                                  ", model expects " + compute::to_string(p.tensor.shape()));
        }
        auto dst = p.tensor.data_mut();
        std::copy(rec.values.begin(), rec.values.end(), dst.begin());
    }
}

Checkpoint Model::to_checkpoint(const std::string& phase, int epoch) const {
    return Checkpoint{phase, config_, num_items_, epoch, snapshot()};
}

Model Model::from_checkpoint(const Checkpoint& ckpt) {
    Model m(ckpt.config, ckpt.num_items, ckpt.config.seed);
    m.restore(ckpt.tensors);
    return m;
}

}  // namespace engine
ADARET_END_NAMESPACE
