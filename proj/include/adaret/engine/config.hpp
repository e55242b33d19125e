// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace adaret::config {

enum class BackboneKind { transformer, gru, filter_mlp };

const char* backbone_name(BackboneKind k);
BackboneKind parse_backbone(const std::string& s);

/// Per-component switches for the two adapters.
struct AdapterToggles {
    bool lft = true;
    bool cat = true;
    bool ira = true;
    bool ura_gru = true;
    bool ura_mlp = true;
    bool ura = true;

    static AdapterToggles all_off() { return {false, false, false, false, false, false}; }
    bool operator==(const AdapterToggles&) const = default;
};

struct TrainConfig {
    // Multi-round retrieval.
    int rounds = 5;
    double lambda = 0.3;
    int k_ctx = 10;
    // Optimization.
    int n_neg = 1;
    int epochs = 200;
    int patience = 10;
    double lr = 1e-3;
    int batch_size = 1024;
    // Model shape.
    int max_len = 50;
    int dim = 64;
    BackboneKind backbone = BackboneKind::transformer;
    int blocks = 2;
    int heads = 2;
    double dropout = 0.2;
    AdapterToggles toggles;
    std::uint64_t seed = 42;
    int eval_k = 50;
    // Variants.
    bool full_vocab = false;
    /// Train on every prefix of each sequence instead of only its last step.
    bool augment = false;
    bool ctx_projections = false;
    bool exclude_target_ctx = false;
    /// Start finetuning from the pretrained backbone (false = the "w/o PT" variant).
    bool use_pretrained = true;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
    /// Slots in the item context pool: (rounds - 1) * k_ctx.
    std::size_t context_capacity() const;
    bool operator==(const TrainConfig&) const = default;
};

/// Assigns one `key = value` setting; unknown keys and bad values throw ConfigError.
void set_value(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines with `#` comments on top of `base`.
TrainConfig parse_config(const std::string& text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});

/// Canonical (key, value) pairs for every field, in a fixed order.
std::vector<std::pair<std::string, std::string>> entries(const TrainConfig& cfg);
/// Canonical `key = value` text; parse_config(to_text(c)) == c.
std::string to_text(const TrainConfig& cfg);
/// FNV-1a over the canonical text, as 16 hex digits.
std::string config_hash(const TrainConfig& cfg);

}  // namespace adaret::config
