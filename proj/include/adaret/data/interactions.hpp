// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adaret::data {

struct Interaction {
    std::string user;
    std::string item;
    std::int64_t timestamp = 0;
};

/// Raw (user, item, timestamp) events in input order.
struct InteractionLog {
    std::vector<Interaction> records;
};

struct LoadOptions {
    char delimiter = '\t';
    bool header = false;
    /// Keep only records with timestamp >= this value (e.g. a date cutoff).
    std::optional<std::int64_t> min_timestamp;
};

/// Reads `user<delim>item<delim>timestamp` lines. Blank lines are skipped;
/// malformed lines raise DataError naming the 1-based line number.
InteractionLog load_interactions(const std::filesystem::path& path, const LoadOptions& options = {});
InteractionLog parse_interactions(std::istream& in, const LoadOptions& options = {});

void write_interactions(const InteractionLog& log, const std::filesystem::path& path, char delimiter = '\t');

/// Iteratively drops users and items with fewer than `min_count` interactions
/// until every survivor meets the threshold. Input order is preserved.
InteractionLog kcore_filter(const InteractionLog& log, std::size_t min_count = 5);

struct DatasetStats {
    std::size_t sequences = 0;
    std::size_t items = 0;
    std::size_t actions = 0;
    /// 1 - actions / (sequences * items)
    double sparsity = 0;
};

DatasetStats stats(const InteractionLog& log);
DatasetStats stats_from_counts(std::size_t sequences, std::size_t items, std::size_t actions);
/// {"sequences":..,"items":..,"actions":..,"sparsity":..}
std::string stats_json(const DatasetStats& s);

}  // namespace adaret::data
