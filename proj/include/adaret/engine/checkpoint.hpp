// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "adaret/engine/model.hpp"

ADARET_BEGIN_NAMESPACE
namespace engine {

inline constexpr int kCheckpointFormatVersion = 1;

/// Writes `dir/manifest.json` and `dir/tensors.bin` (little-endian f32,
/// row-major, manifest order). The directory is created if needed.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);

/// Reads a checkpoint directory. Throws CheckpointError for a format version
/// mismatch, a payload shorter than the manifest ("truncated payload") and a
/// payload or model disagreeing with the manifest index ("missing tensor").
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace engine
ADARET_END_NAMESPACE
