// SPDX-License-Identifier: Apache-2.0
#include "adaret/data/batches.hpp"

#include <algorithm>
#include <numeric>

#include "adaret/common.hpp"

namespace adaret::data {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::train: return "train";
        case Phase::valid: return "valid";
        case Phase::test: return "test";
    }
    return "?";
}

std::vector<Example> make_examples(const SplitDataset& split, Phase phase, bool augment) {
    std::vector<Example> out;
    for (const auto& u : split.users) {
        switch (phase) {
            case Phase::train: {
                const auto& s = u.train;
                if (s.size() < 2) break;
                const std::size_t first = augment ? 1 : s.size() - 1;
                for (std::size_t p = first; p < s.size(); ++p) {
                    out.push_back({u.user, std::vector<int>(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(p)), s[p]});
                }
                break;
            }
            case Phase::valid:
                if (u.train.empty()) break;
                out.push_back({u.user, u.train, u.valid});
                break;
            case Phase::test: {
                auto input = u.train;
                input.push_back(u.valid);
                out.push_back({u.user, std::move(input), u.test});
                break;
            }
        }
    }
    return out;
}

Batch collate(std::span<const Example> examples, std::size_t max_len) {
    if (max_len == 0) throw DataError("max_len must be at least 1");
    Batch b;
    b.rows = examples.size();
    b.width = max_len;
    b.ids.assign(b.rows * max_len, 0);
    for (std::size_t r = 0; r < b.rows; ++r) {
        const auto& ex = examples[r];
        if (ex.input.empty()) throw DataError("empty sequence");
        const std::size_t len = std::min(ex.input.size(), max_len);
        const auto src = ex.input.end() - static_cast<std::ptrdiff_t>(len);
        std::copy(src, ex.input.end(), b.ids.begin() + static_cast<std::ptrdiff_t>((r + 1) * max_len - len));
        b.lengths.push_back(len);
        b.targets.push_back(ex.target);
        b.users.push_back(ex.user);
        auto h = ex.input;
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
        b.history.push_back(std::move(h));
    }
    return b;
}

std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t max_len, std::size_t batch_size,
                                Rng* rng) {
    if (batch_size == 0) throw DataError("batch_size must be at least 1");
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (rng) rng->shuffle(order);
    std::vector<Batch> out;
    std::vector<Example> chunk;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        chunk.clear();
        for (std::size_t i = start; i < end; ++i) chunk.push_back(examples[order[i]]);
        out.push_back(collate(chunk, max_len));
    }
    return out;
}

std::vector<Batch> make_batches(const SplitDataset& split, Phase phase, std::size_t max_len,
                                std::size_t batch_size, Rng* rng, bool augment) {
    const auto examples = make_examples(split, phase, augment);
    return make_batches(examples, max_len, batch_size, rng);
}

}  // namespace adaret::data
