// SPDX-License-Identifier: Apache-2.0
#include "adaret/data/synthetic.hpp"

#include <array>
#include <string>
#include <vector>

#include "adaret/common.hpp"
#include "adaret/rng.hpp"

namespace adaret::data {

namespace {

std::string user_name(std::size_t u) { return "u" + std::to_string(u + 1); }
std::string item_name(std::size_t i) { return "i" + std::to_string(i); }

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

InteractionLog cycle_log(std::size_t users, std::size_t items, std::size_t length, std::uint64_t seed) {
    if (users == 0 || items == 0 || length == 0) throw DataError("cycle_log: sizes must be positive");
    Rng rng(seed);
    InteractionLog log;
    for (std::size_t u = 0; u < users; ++u) {
        const auto start = static_cast<std::size_t>(rng.below(items));
        for (std::size_t j = 0; j < length; ++j) {
            log.records.push_back({user_name(u), item_name((start + j) % items + 1), static_cast<std::int64_t>(j)});
        }
    }
    return log;
}

InteractionLog two_cluster_log(const TwoClusterOptions& o) {
    if (o.users == 0 || o.cluster_size < 2) throw DataError("two_cluster_log: need users and clusters of size >= 2");
    if (o.min_history == 0 || o.min_history > o.max_history || o.max_step == 0 || o.minority_tail < 2) {
        throw DataError("two_cluster_log: inconsistent history settings");
    }
    if (!(o.majority > 0.5 && o.majority <= 1.0)) throw DataError("two_cluster_log: majority must be in (0.5, 1]");
    Rng rng(o.seed);
    InteractionLog log;
    for (std::size_t u = 0; u < o.users; ++u) {
        std::array<std::size_t, 2> pos{static_cast<std::size_t>(rng.below(o.cluster_size)),
                                       static_cast<std::size_t>(rng.below(o.cluster_size))};
        const std::size_t major = static_cast<std::size_t>(rng.below(2));
        std::int64_t ts = 0;
        auto emit = [&](std::size_t c) {
            pos[c] = (pos[c] + between(rng, 1, o.max_step)) % o.cluster_size;
            log.records.push_back({user_name(u), item_name(c * o.cluster_size + pos[c] + 1), ts++});
        };
        const std::size_t length = between(rng, o.min_history, o.max_history);
        // Redraw until the majority cluster really holds most of the history.
        std::vector<std::size_t> picks(length);
        std::size_t in_major = 0;
        while (in_major * 2 <= length) {
            in_major = 0;
            for (auto& c : picks) {
                c = rng.bernoulli(o.majority) ? major : major ^ 1;
                in_major += c == major;
            }
        }
        for (const auto c : picks) emit(c);
        for (std::size_t i = 0; i < o.minority_tail; ++i) emit(major ^ 1);
    }
    return log;
}

int two_cluster_of(const std::string& item, std::size_t cluster_size) {
    const auto id = std::stoul(item.substr(1));
    if (id == 0 || id > 2 * cluster_size) throw DataError("two_cluster_of: item " + item + " is not a cluster item");
    return id > cluster_size ? 1 : 0;
}

}  // namespace adaret::data
