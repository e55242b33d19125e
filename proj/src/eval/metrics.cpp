// SPDX-License-Identifier: Apache-2.0
#include "adaret/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaret/common.hpp"

namespace adaret::metrics {

namespace {

void check(std::size_t lists, std::size_t targets, long k) {
    if (k <= 0) throw ConfigError("K must be positive, got " + std::to_string(k));
    if (lists != targets) throw ShapeError("ranked lists and targets differ in count");
    if (lists == 0) throw DataError("no users to evaluate");
}

}  // namespace

std::size_t rank_of(std::span<const int> ranked, int target, long k) {
    const auto n = std::min(ranked.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        if (ranked[i] == target) return i + 1;
    }
    return 0;
}

double hr_at_k(std::span<const std::vector<int>> ranked, std::span<const int> targets, long k) {
    check(ranked.size(), targets.size(), k);
    std::size_t hits = 0;
    for (std::size_t u = 0; u < ranked.size(); ++u) hits += rank_of(ranked[u], targets[u], k) > 0;
    return static_cast<double>(hits) / static_cast<double>(ranked.size());
}

double ndcg_at_k(std::span<const std::vector<int>> ranked, std::span<const int> targets, long k) {
    check(ranked.size(), targets.size(), k);
    double total = 0;
    for (std::size_t u = 0; u < ranked.size(); ++u) {
        const auto r = rank_of(ranked[u], targets[u], k);
        if (r > 0) total += 1.0 / std::log2(static_cast<double>(r) + 1.0);
    }
    return total / static_cast<double>(ranked.size());
}

}  // namespace adaret::metrics
