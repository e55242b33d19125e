// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"

ADARET_BEGIN_NAMESPACE
namespace adapter {

using compute::Tensor;

/// Per-row pool of items retrieved in earlier rounds. Ids fill slots from the
/// left; unused slots hold the padding id 0.
class ItemContext {
   public:
    ItemContext() = default;
    ItemContext(std::size_t rows, std::size_t capacity);

    std::size_t rows() const { return rows_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t count(std::size_t row) const { return counts_[row]; }
    bool empty() const;

    std::span<const int> ids() const { return ids_; }
    std::span<const int> row(std::size_t r) const { return {ids_.data() + r * capacity_, counts_[r]}; }
    bool contains(std::size_t r, int id) const;

    /// Appends ids to row r. Throws on overflow or on a duplicate id.
    void append(std::size_t r, std::span<const int> ids);

    /// 1 for occupied slots, row-major [rows, capacity].
    std::vector<std::uint8_t> mask() const;

   private:
    std::size_t rows_ = 0;
    std::size_t capacity_ = 0;
    std::vector<int> ids_;
    std::vector<std::size_t> counts_;
};

/// Ordered adapted user vectors of earlier rounds, each [B, d].
struct UserContextStack {
    std::vector<Tensor> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

/// Returns the stack with `f` appended.
UserContextStack extend_user_context(UserContextStack stack, const Tensor& f);

}  // namespace adapter
ADARET_END_NAMESPACE
