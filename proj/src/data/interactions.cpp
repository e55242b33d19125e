// SPDX-License-Identifier: Apache-2.0
#include "adaret/data/interactions.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "adaret/common.hpp"
#include "json.hpp"

namespace adaret::data {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

InteractionLog parse_interactions(std::istream& in, const LoadOptions& options) {
    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.header;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split_fields(text, options.delimiter);
        if (fields.size() != 3) {
            throw DataError(line_error(line_no, "expected 3 fields, found " + std::to_string(fields.size())));
        }
        const auto user = trim(fields[0]);
        const auto item = trim(fields[1]);
        const auto ts_text = trim(fields[2]);
        if (user.empty() || item.empty()) throw DataError(line_error(line_no, "empty user or item id"));
        std::int64_t ts = 0;
        const auto [end, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
        if (ec != std::errc() || end != ts_text.data() + ts_text.size()) {
            throw DataError(line_error(line_no, "unparseable timestamp '" + std::string(ts_text) + "'"));
        }
        if (options.min_timestamp && ts < *options.min_timestamp) continue;
        log.records.push_back({std::string(user), std::string(item), ts});
    }
    if (log.records.empty()) throw DataError("interaction log is empty");
    return log;
}

InteractionLog load_interactions(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open interaction file " + path.string());
    return parse_interactions(in, options);
}

void write_interactions(const InteractionLog& log, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& r : log.records) out << r.user << delimiter << r.item << delimiter << r.timestamp << '\n';
}

InteractionLog kcore_filter(const InteractionLog& log, std::size_t min_count) {
    if (min_count == 0) throw DataError("kcore_filter: min_count must be at least 1");
    std::vector<bool> keep(log.records.size(), true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::unordered_map<std::string_view, std::size_t> user_count, item_count;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) continue;
            ++user_count[log.records[i].user];
            ++item_count[log.records[i].item];
        }
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) continue;
            const auto& r = log.records[i];
            if (user_count[r.user] < min_count || item_count[r.item] < min_count) {
                keep[i] = false;
                changed = true;
            }
        }
    }
    InteractionLog out;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) out.records.push_back(log.records[i]);
    }
    if (out.records.empty()) throw DataError("dataset vanished under k-core");
    return out;
}

DatasetStats stats_from_counts(std::size_t sequences, std::size_t items, std::size_t actions) {
    DatasetStats s{sequences, items, actions, 0.0};
    const double cells = static_cast<double>(sequences) * static_cast<double>(items);
    s.sparsity = cells > 0 ? 1.0 - static_cast<double>(actions) / cells : 0.0;
    return s;
}

DatasetStats stats(const InteractionLog& log) {
    if (log.records.empty()) throw DataError("stats: empty log");
    std::unordered_map<std::string_view, int> users, items;
    for (const auto& r : log.records) {
        users.emplace(r.user, 0);
        items.emplace(r.item, 0);
    }
    return stats_from_counts(users.size(), items.size(), log.records.size());
}

std::string stats_json(const DatasetStats& s) {
    nlohmann::ordered_json j;
    j["sequences"] = s.sequences;
    j["items"] = s.items;
    j["actions"] = s.actions;
    j["sparsity"] = s.sparsity;
    return j.dump();
}

}  // namespace adaret::data
