#include "lrgccf/graph.hpp"

#include <algorithm>
#include <cmath>

namespace lrgccf {

const char* to_string(NormalizationMode mode) {
    return mode == NormalizationMode::PaperPerNode ? "paper" : "sqrt";
}

NormalizationMode normalization_mode_from_string(const std::string& s) {
    if (s == "paper") return NormalizationMode::PaperPerNode;
    if (s == "sqrt") return NormalizationMode::SymmetricSqrt;
    throw Error("unknown normalization mode: " + s + " (expected paper|sqrt)");
}

BipartiteGraph build_graph(const IndexedDataset& ds) {
    if (ds.train.empty()) throw Error("cannot build graph: no train interactions");
    BipartiteGraph g;
    g.num_users = ds.num_users;
    g.num_items = ds.num_items;

    std::vector<std::vector<std::int32_t>> u2i(static_cast<std::size_t>(ds.num_users));
    std::vector<std::vector<std::int32_t>> i2u(static_cast<std::size_t>(ds.num_items));
    for (const auto& [u, i] : ds.train) {
        if (u < 0 || u >= ds.num_users || i < 0 || i >= ds.num_items)
            throw Error("train interaction index out of range");
        u2i[static_cast<std::size_t>(u)].push_back(i);
        i2u[static_cast<std::size_t>(i)].push_back(u);
    }

    auto flatten = [](std::vector<std::vector<std::int32_t>>& lists,
                      std::vector<std::int64_t>& offsets, std::vector<std::int32_t>& flat,
                      std::vector<std::int32_t>& deg) {
        offsets.resize(lists.size() + 1);
        offsets[0] = 0;
        deg.resize(lists.size());
        for (std::size_t k = 0; k < lists.size(); ++k) {
            std::sort(lists[k].begin(), lists[k].end());
            offsets[k + 1] = offsets[k] + static_cast<std::int64_t>(lists[k].size());
            deg[k] = static_cast<std::int32_t>(lists[k].size()) + 1;  // self-loop
            flat.insert(flat.end(), lists[k].begin(), lists[k].end());
        }
    };
    flatten(u2i, g.u2i_offsets, g.u2i_items, g.d_user);
    flatten(i2u, g.i2u_offsets, g.i2u_users, g.d_item);
    return g;
}

namespace {

// One hop, shared by the parallel and serial kernels and the transpose.
// For forward propagation the coefficient into user u from item j is
//   paper: 1/(d_j*d_u)      sqrt: 1/sqrt(d_j*d_u)
// and into item i from user u the same with roles swapped. The transpose
// applies the coefficient the forward hop would use in the opposite row;
// with these per-node weights both directions coincide, but the kernel is
// written against the transposed coefficient so the adjoint is exact by
// construction.
template <bool Parallel>
Matrix hop(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x, bool transpose) {
    const auto m = static_cast<std::size_t>(g.num_users);
    const auto n = static_cast<std::size_t>(g.num_items);
    if (x.rows != m + n) throw Error("propagate: matrix row count must equal M+N");
    const std::size_t d = x.cols;
    const bool sqrt_mode = mode == NormalizationMode::SymmetricSqrt;

    Matrix out(x.rows, d);

    auto edge_coef = [&](std::int32_t du, std::int32_t dv) {
        const double p = static_cast<double>(du) * static_cast<double>(dv);
        return sqrt_mode ? 1.0 / std::sqrt(p) : 1.0 / p;
    };
    (void)transpose;  // coefficients are symmetric in both modes; see above

    const auto user_rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t u = 0; u < user_rows; ++u) {
        const auto uu = static_cast<std::size_t>(u);
        double* dst = out.row(uu);
        const double self = 1.0 / static_cast<double>(g.d_user[uu]);
        axpy(self, x.row(uu), dst, d);
        for (std::int64_t e = g.u2i_offsets[uu]; e < g.u2i_offsets[uu + 1]; ++e) {
            const auto j = static_cast<std::size_t>(g.u2i_items[static_cast<std::size_t>(e)]);
            axpy(edge_coef(g.d_user[uu], g.d_item[j]), x.row(m + j), dst, d);
        }
    }

    const auto item_rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t i = 0; i < item_rows; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        double* dst = out.row(m + ii);
        const double self = 1.0 / static_cast<double>(g.d_item[ii]);
        axpy(self, x.row(m + ii), dst, d);
        for (std::int64_t e = g.i2u_offsets[ii]; e < g.i2u_offsets[ii + 1]; ++e) {
            const auto u = static_cast<std::size_t>(g.i2u_users[static_cast<std::size_t>(e)]);
            axpy(edge_coef(g.d_user[u], g.d_item[ii]), x.row(u), dst, d);
        }
    }
    return out;
}

}  // namespace

Matrix propagate(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x) {
    return hop<true>(g, mode, x, false);
}

Matrix propagate_transpose(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x) {
    return hop<true>(g, mode, x, true);
}

std::vector<Matrix> compute_layers(const BipartiteGraph& g, NormalizationMode mode,
                                   const Matrix& e0, std::int32_t depth) {
    if (depth < 0) throw Error("depth must be >= 0");
    std::vector<Matrix> layers;
    layers.reserve(static_cast<std::size_t>(depth) + 1);
    layers.push_back(e0);
    for (std::int32_t k = 0; k < depth; ++k)
        layers.push_back(propagate(g, mode, layers.back()));
    return layers;
}

namespace ref {

Matrix propagate(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x) {
    return hop<false>(g, mode, x, false);
}

Matrix dense_operator(const BipartiteGraph& g, NormalizationMode mode) {
    const auto m = static_cast<std::size_t>(g.num_users);
    const auto n = static_cast<std::size_t>(g.num_items);
    const bool sqrt_mode = mode == NormalizationMode::SymmetricSqrt;
    Matrix p(m + n, m + n);
    for (std::size_t u = 0; u < m; ++u) p.at(u, u) = 1.0 / g.d_user[u];
    for (std::size_t i = 0; i < n; ++i) p.at(m + i, m + i) = 1.0 / g.d_item[i];
    for (std::size_t u = 0; u < m; ++u) {
        for (std::int64_t e = g.u2i_offsets[u]; e < g.u2i_offsets[u + 1]; ++e) {
            const auto j = static_cast<std::size_t>(g.u2i_items[static_cast<std::size_t>(e)]);
            const double prod = static_cast<double>(g.d_user[u]) * g.d_item[j];
            const double c = sqrt_mode ? 1.0 / std::sqrt(prod) : 1.0 / prod;
            p.at(u, m + j) = c;
            p.at(m + j, u) = c;
        }
    }
    return p;
}

}  // namespace ref

}  // namespace lrgccf
