// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaret/eval/metrics.hpp"
#include "test_support.hpp"

using namespace adaret;

namespace {

struct Instance {
    std::vector<std::vector<int>> ranked;
    std::vector<int> targets;
    std::vector<std::vector<double>> scores;
};

// Random scores per (user, item); ranked lists sort items by score.
Instance random_instance(std::size_t users, std::size_t items, Rng& rng) {
    Instance inst;
    for (std::size_t u = 0; u < users; ++u) {
        std::vector<double> s(items + 1);
        for (auto& v : s) v = rng.uniform();
        std::vector<int> order(items);
        std::iota(order.begin(), order.end(), 1);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
        inst.ranked.push_back(order);
        inst.targets.push_back(static_cast<int>(rng.below(items)) + 1);
        inst.scores.push_back(std::move(s));
    }
    return inst;
}

// Rank by counting strictly better items: no list lookup involved.
std::size_t brute_rank(const std::vector<double>& s, int target, std::size_t items) {
    std::size_t better = 0;
    for (std::size_t i = 1; i <= items; ++i) better += s[i] > s[target];
    return better + 1;
}

}  // namespace

TEST_CASE("HR and NDCG equal a brute-force count", "[metrics]") {
    Rng rng(31);
    const std::size_t users = 100, items = 50;
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_instance(users, items, rng);
        for (long k : {1L, 5L, 10L, 20L, 50L}) {
            double hits = 0, gain = 0;
            for (std::size_t u = 0; u < users; ++u) {
                const auto r = brute_rank(inst.scores[u], inst.targets[u], items);
                if (r <= static_cast<std::size_t>(k)) {
                    hits += 1;
                    gain += 1.0 / std::log2(static_cast<double>(r) + 1.0);
                }
            }
            CHECK(metrics::hr_at_k(inst.ranked, inst.targets, k) == hits / users);
            CHECK(metrics::ndcg_at_k(inst.ranked, inst.targets, k) == gain / users);
        }
    }
}

TEST_CASE("hand-ranked toy case", "[metrics]") {
    const std::vector<std::vector<int>> ranked{{7, 3, 9}};
    const std::vector<int> target{3};
    CHECK(std::abs(metrics::ndcg_at_k(ranked, target, 2) - 1.0 / std::log2(3.0)) <= 1e-9);
    CHECK(metrics::hr_at_k(ranked, target, 2) == 1.0);
    CHECK(metrics::hr_at_k(ranked, target, 1) == 0.0);
    CHECK(metrics::ndcg_at_k(ranked, target, 1) == 0.0);
    CHECK(metrics::rank_of(ranked[0], 9, 50) == 3);
    CHECK(metrics::rank_of(ranked[0], 4, 50) == 0);
}

TEST_CASE("metric arguments are validated", "[metrics]") {
    const std::vector<std::vector<int>> ranked{{1}};
    const std::vector<int> one{1};
    const std::vector<int> two{1, 2};
    REQUIRE_THROWS_AS(metrics::hr_at_k(ranked, one, 0), ConfigError);
    REQUIRE_THROWS_AS(metrics::ndcg_at_k(ranked, two, 5), ShapeError);
}
