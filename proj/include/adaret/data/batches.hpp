// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "adaret/data/split.hpp"
#include "adaret/rng.hpp"

namespace adaret::data {

/// Which target a sequence is paired with.
///  - train: the next item inside the training sequence
///  - valid: input = train sequence, target = validation item
///  - test:  input = train sequence + validation item, target = test item
enum class Phase { train, valid, test };

const char* phase_name(Phase p);

/// One (history, next item) pair.
struct Example {
    std::size_t user = 0;
    std::vector<int> input;
    int target = 0;
};

/// With `augment`, every training prefix of length >= 1 becomes its own
/// example; otherwise only the full training sequence minus its last item.
/// Users whose training sequence is too short for the phase are skipped.
std::vector<Example> make_examples(const SplitDataset& split, Phase phase, bool augment = false);

/// Left-padded id matrix [rows, width]. Rows longer than `width` keep their
/// most recent items.
struct Batch {
    std::size_t rows = 0;
    std::size_t width = 0;
    std::vector<int> ids;
    std::vector<std::size_t> lengths;
    std::vector<int> targets;
    std::vector<std::size_t> users;
    /// Sorted, deduplicated full (untruncated) input history per row.
    std::vector<std::vector<int>> history;

    int at(std::size_t r, std::size_t c) const { return ids[r * width + c]; }
};

Batch collate(std::span<const Example> examples, std::size_t max_len);

/// Splits `examples` into consecutive batches, shuffling the order first when
/// `rng` is given.
std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t max_len, std::size_t batch_size,
                                Rng* rng = nullptr);

std::vector<Batch> make_batches(const SplitDataset& split, Phase phase, std::size_t max_len,
                                std::size_t batch_size, Rng* rng = nullptr, bool augment = false);

}  // namespace adaret::data
