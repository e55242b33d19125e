// SPDX-License-Identifier: Apache-2.0
#include "adaret/backbone/embedding.hpp"

#include <cmath>

#include "adaret/compute/init.hpp"
#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace backbone {

EmbeddingTable EmbeddingTable::init(std::size_t num_items, std::size_t dim, Rng& rng) {
    if (num_items == 0 || dim == 0) throw ShapeError("embedding table needs at least one item and dimension");
    EmbeddingTable t{compute::fan_in_param({num_items + 1, dim}, dim, rng)};
    auto w = t.weight.data_mut();
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim), Real(0));
    return t;
}

Tensor embed_sequence(const EmbeddingTable& table, std::span<const int> ids, std::size_t rows, std::size_t width) {
    return compute::gather_rows(table.weight, ids, {rows, width}, 0);
}

std::vector<Real> score_items(const Tensor& f, const EmbeddingTable& table, std::span<const std::vector<int>> exclude) {
    if (f.rank() != 2 || f.dim(1) != table.dim()) {
        throw ShapeError("score_items: user vectors " + compute::to_string(f.shape()) + " vs table dimension " +
                         std::to_string(table.dim()));
    }
    const std::size_t B = f.dim(0), d = table.dim(), V = table.num_items() + 1;
    if (!exclude.empty() && exclude.size() != B) throw ShapeError("score_items: one exclusion set per row required");
    std::vector<Real> out(B * V);
    const Real* fv = f.data().data();
    const Real* tv = table.weight.data().data();
    for (std::size_t b = 0; b < B; ++b) {
        Real* row = out.data() + b * V;
        const Real* fb = fv + b * d;
        row[0] = kExcludedScore;
        for (std::size_t i = 1; i < V; ++i) {
            const Real* e = tv + i * d;
            Real acc = 0;
            for (std::size_t c = 0; c < d; ++c) acc += fb[c] * e[c];
            row[i] = acc;
        }
        if (exclude.empty()) continue;
        for (int id : exclude[b]) {
            if (id < 0 || static_cast<std::size_t>(id) >= V) {
                throw ShapeError("score_items: excluded id " + std::to_string(id) + " out of range");
            }
            row[id] = kExcludedScore;
        }
    }
    return out;
}

}  // namespace backbone
ADARET_END_NAMESPACE
