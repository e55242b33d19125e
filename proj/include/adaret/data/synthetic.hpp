// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "adaret/data/interactions.hpp"

namespace adaret::data {

/// Every user walks the item ring 1..items in steps of +1 from a random
/// start, so the next item is a deterministic function of the current one.
InteractionLog cycle_log(std::size_t users, std::size_t items, std::size_t length, std::uint64_t seed);

struct TwoClusterOptions {
    std::size_t users = 1000;
    /// Items per cluster; cluster 0 owns items 1..n, cluster 1 owns n+1..2n.
    std::size_t cluster_size = 50;
    /// Majority-dominated history length before the minority tail.
    std::size_t min_history = 8;
    std::size_t max_history = 16;
    /// Probability that a history step stays in the user's majority cluster
    /// (must exceed 0.5).
    double majority = 0.75;
    /// Largest forward step of the within-cluster walk.
    std::size_t max_step = 15;
    /// Minority-cluster interactions closing every history (at least 2).
    std::size_t minority_tail = 2;
    std::uint64_t seed = 1;
};

/// Multi-interest histories over two disjoint item clusters. Each user has a
/// majority cluster and a minority cluster and keeps a walk position in both;
/// every step picks a cluster (majority with probability `majority`) and
/// advances that walk by 1..max_step. Histories are redrawn until the majority
/// cluster holds more than half of them. Each history then ends with
/// `minority_tail` steps in the minority cluster; the last two become the
/// validation and test targets.
InteractionLog two_cluster_log(const TwoClusterOptions& options);

/// Which cluster (0 or 1) a raw item name from two_cluster_log belongs to.
int two_cluster_of(const std::string& item, std::size_t cluster_size);

}  // namespace adaret::data
