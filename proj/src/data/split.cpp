// SPDX-License-Identifier: Apache-2.0
#include "adaret/data/split.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "adaret/common.hpp"
#include "json.hpp"

namespace adaret::data {

int Vocab::item_id(const std::string& raw) const {
    const auto it = item_index.find(raw);
    if (it == item_index.end()) throw DataError("unknown item id '" + raw + "'");
    return it->second;
}

std::size_t Vocab::user_id(const std::string& raw) const {
    const auto it = user_index.find(raw);
    if (it == user_index.end()) throw DataError("unknown user id '" + raw + "'");
    return it->second;
}

int Vocab::add_item(const std::string& raw) {
    const auto [it, inserted] = item_index.emplace(raw, static_cast<int>(item_raw.size()));
    if (inserted) item_raw.push_back(raw);
    return it->second;
}

std::size_t Vocab::add_user(const std::string& raw) {
    const auto [it, inserted] = user_index.emplace(raw, user_raw.size());
    if (inserted) user_raw.push_back(raw);
    return it->second;
}

SplitResult build_split(const InteractionLog& log) {
    SplitResult out;
    auto& vocab = out.vocab;
    std::vector<std::vector<std::size_t>> per_user;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        const auto u = vocab.add_user(r.user);
        vocab.add_item(r.item);
        if (u == per_user.size()) per_user.emplace_back();
        per_user[u].push_back(i);
    }
    out.dataset.num_items = vocab.num_items();
    out.dataset.users.reserve(per_user.size());
    for (std::size_t u = 0; u < per_user.size(); ++u) {
        auto& idx = per_user[u];
        if (idx.size() < 3) {
            throw DataError("user '" + vocab.user_raw[u] + "' has " + std::to_string(idx.size()) +
                            " interactions; at least 3 are needed to split");
        }
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return log.records[a].timestamp < log.records[b].timestamp;
        });
        UserSequence seq;
        seq.user = u;
        for (std::size_t j = 0; j + 2 < idx.size(); ++j) seq.train.push_back(vocab.item_id(log.records[idx[j]].item));
        seq.valid = vocab.item_id(log.records[idx[idx.size() - 2]].item);
        seq.test = vocab.item_id(log.records[idx.back()].item);
        out.dataset.users.push_back(std::move(seq));
    }
    return out;
}

std::vector<int> full_history(const UserSequence& u) {
    auto h = u.train;
    h.push_back(u.valid);
    h.push_back(u.test);
    return h;
}

void save_split(const SplitResult& split, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "adaret-split";
    j["num_items"] = split.dataset.num_items;
    j["items"] = std::vector<std::string>(split.vocab.item_raw.begin() + 1, split.vocab.item_raw.end());
    j["users"] = split.vocab.user_raw;
    auto& seqs = j["sequences"] = nlohmann::json::array();
    for (const auto& u : split.dataset.users) {
        seqs.push_back({{"user", u.user}, {"train", u.train}, {"valid", u.valid}, {"test", u.test}});
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump() << '\n';
}

SplitResult load_split(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed dataset " + path.string() + ": " + e.what());
    }
    if (j.value("format", std::string()) != "adaret-split") throw DataError(path.string() + " is not a prepared dataset");
    SplitResult out;
    try {
        for (const auto& raw : j.at("items")) out.vocab.add_item(raw.get<std::string>());
        for (const auto& raw : j.at("users")) out.vocab.add_user(raw.get<std::string>());
        out.dataset.num_items = j.at("num_items").get<std::size_t>();
        for (const auto& s : j.at("sequences")) {
            UserSequence u;
            u.user = s.at("user").get<std::size_t>();
            u.train = s.at("train").get<std::vector<int>>();
            u.valid = s.at("valid").get<int>();
            u.test = s.at("test").get<int>();
            out.dataset.users.push_back(std::move(u));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed dataset " + path.string() + ": " + e.what());
    }
    if (out.dataset.num_items != out.vocab.num_items()) throw DataError("dataset item count disagrees with vocabulary");
    const auto n = static_cast<int>(out.dataset.num_items);
    for (const auto& u : out.dataset.users) {
        for (int id : full_history(u)) {
            if (id < 1 || id > n) throw DataError("dataset contains out-of-range item id " + std::to_string(id));
        }
    }
    return out;
}

}  // namespace adaret::data
