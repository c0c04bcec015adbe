#ifndef LRGCCF_TESTS_HELPERS_HPP_
#define LRGCCF_TESTS_HELPERS_HPP_

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "lrgccf/dataset.hpp"
#include "lrgccf/graph.hpp"
#include "lrgccf/matrix.hpp"
#include "lrgccf/model.hpp"

namespace testutil {

using namespace lrgccf;

// Random bipartite train set where every user and item has at least one edge.
inline IndexedDataset random_dataset(std::int32_t users, std::int32_t items,
                                     std::int32_t extra_edges, std::mt19937_64& rng) {
    IndexedDataset ds;
    ds.num_users = users;
    ds.num_items = items;
    std::set<std::pair<std::int32_t, std::int32_t>> edges;
    std::uniform_int_distribution<std::int32_t> udist(0, users - 1), idist(0, items - 1);
    for (std::int32_t u = 0; u < users; ++u) edges.emplace(u, idist(rng));
    for (std::int32_t i = 0; i < items; ++i) edges.emplace(udist(rng), i);
    for (std::int32_t e = 0; e < extra_edges; ++e) edges.emplace(udist(rng), idist(rng));
    ds.train.assign(edges.begin(), edges.end());
    ds.user_train_items.assign(static_cast<std::size_t>(users), {});
    for (const auto& [u, i] : ds.train)
        ds.user_train_items[static_cast<std::size_t>(u)].push_back(i);
    for (auto& v : ds.user_train_items) std::sort(v.begin(), v.end());
    return ds;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
    Matrix m(rows, cols);
    std::normal_distribution<double> gauss(0.0, scale);
    for (double& v : m.data) v = gauss(rng);
    return m;
}

// Dense row-major product: (r x k) * (k x c)
inline Matrix dense_multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = a.at(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t idx = 0; idx < a.data.size(); ++idx)
        m = std::max(m, std::abs(a.data[idx] - b.data[idx]));
    return m;
}

}  // namespace testutil

#endif
