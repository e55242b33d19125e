// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaret/data/interactions.hpp"

namespace adaret::data {

/// Raw id <-> dense id maps. Item id 0 is the padding item and has no raw id.
struct Vocab {
    std::vector<std::string> item_raw{std::string()};
    std::vector<std::string> user_raw;
    std::unordered_map<std::string, int> item_index;
    std::unordered_map<std::string, std::size_t> user_index;

    std::size_t num_items() const { return item_raw.size() - 1; }
    std::size_t num_users() const { return user_raw.size(); }
    /// Dense id of a raw item id; throws DataError when unknown.
    int item_id(const std::string& raw) const;
    std::size_t user_id(const std::string& raw) const;

    int add_item(const std::string& raw);
    std::size_t add_user(const std::string& raw);
};

struct UserSequence {
    std::size_t user = 0;
    std::vector<int> train;
    int valid = 0;
    int test = 0;
};

/// Leave-one-out partition: last interaction is the test target, the one
/// before it the validation target, the rest the training sequence.
struct SplitDataset {
    std::size_t num_items = 0;
    std::vector<UserSequence> users;
};

struct SplitResult {
    SplitDataset dataset;
    Vocab vocab;
};

/// Groups records per user, orders them by timestamp (ties keep file order)
/// and assigns dense ids in order of first appearance. Users with fewer than
/// three interactions cannot be split and raise DataError.
SplitResult build_split(const InteractionLog& log);

/// The user's full chronological history train + valid + test.
std::vector<int> full_history(const UserSequence& u);

void save_split(const SplitResult& split, const std::filesystem::path& path);
SplitResult load_split(const std::filesystem::path& path);

}  // namespace adaret::data
