// SPDX-License-Identifier: Apache-2.0
#include "adaret/adapter/context.hpp"

#include <algorithm>

ADARET_BEGIN_NAMESPACE
namespace adapter {

ItemContext::ItemContext(std::size_t rows, std::size_t capacity)
    : rows_(rows), capacity_(capacity), ids_(rows * capacity, 0), counts_(rows, 0) {}

bool ItemContext::empty() const {
    return std::all_of(counts_.begin(), counts_.end(), [](std::size_t c) { return c == 0; });
}

bool ItemContext::contains(std::size_t r, int id) const {
    const auto ids = row(r);
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

void ItemContext::append(std::size_t r, std::span<const int> ids) {
    if (r >= rows_) throw ShapeError("item context: row out of range");
    if (counts_[r] + ids.size() > capacity_) {
        throw ShapeError("item context: capacity " + std::to_string(capacity_) + " exceeded");
    }
    for (int id : ids) {
        if (id <= 0) throw ShapeError("item context: invalid item id " + std::to_string(id));
        if (contains(r, id)) throw ShapeError("item context: duplicate item id " + std::to_string(id));
        ids_[r * capacity_ + counts_[r]++] = id;
    }
}

std::vector<std::uint8_t> ItemContext::mask() const {
    std::vector<std::uint8_t> m(rows_ * capacity_, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::fill_n(m.begin() + static_cast<std::ptrdiff_t>(r * capacity_), counts_[r], std::uint8_t{1});
    }
    return m;
}

UserContextStack extend_user_context(UserContextStack stack, const Tensor& f) {
    if (!stack.empty() && stack.entries.front().shape() != f.shape()) {
        throw ShapeError("user context: vector shape " + compute::to_string(f.shape()) + " differs from stack");
    }
    stack.entries.push_back(f);
    return stack;
}

}  // namespace adapter
ADARET_END_NAMESPACE
