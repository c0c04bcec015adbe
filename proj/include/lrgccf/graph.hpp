#ifndef LRGCCF_GRAPH_HPP_
#define LRGCCF_GRAPH_HPP_

#include <cstdint>
#include <vector>

#include "lrgccf/dataset.hpp"
#include "lrgccf/matrix.hpp"

namespace lrgccf {

// Propagation coefficients for one hop.
//   PaperPerNode:  edge j->u weighted 1/(d_j * d_u), self term 1/d_u
//   SymmetricSqrt: edge j->u weighted 1/sqrt(d_j * d_u), self term 1/d_u
// Degrees include the self-loop (+1).
enum class NormalizationMode { PaperPerNode, SymmetricSqrt };

const char* to_string(NormalizationMode mode);
NormalizationMode normalization_mode_from_string(const std::string& s);

// User-item bipartite adjacency in CSR form, both orientations.
struct BipartiteGraph {
    std::int32_t num_users = 0;
    std::int32_t num_items = 0;
    // u2i: per-user ascending item neighbors
    std::vector<std::int64_t> u2i_offsets;
    std::vector<std::int32_t> u2i_items;
    // i2u: per-item ascending user neighbors
    std::vector<std::int64_t> i2u_offsets;
    std::vector<std::int32_t> i2u_users;
    // degree-with-self-loop: neighbor count + 1
    std::vector<std::int32_t> d_user;
    std::vector<std::int32_t> d_item;

    std::int64_t edge_count() const { return static_cast<std::int64_t>(u2i_items.size()); }
    std::int64_t node_count() const { return num_users + num_items; }
};

// Builds the graph from train interactions only.
BipartiteGraph build_graph(const IndexedDataset& ds);

// One propagation hop: X' = P X where P is the normalized adjacency with
// self loops under `mode`. Rows 0..M of X are users, M..M+N items.
// Parallel over output rows; neighbor sums run in ascending index order,
// so output is bitwise-deterministic regardless of thread count.
Matrix propagate(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x);

// X' = P^T X for the exact operator applied by propagate.
Matrix propagate_transpose(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x);

// [E^0, P E^0, ..., P^K E^0]
std::vector<Matrix> compute_layers(const BipartiteGraph& g, NormalizationMode mode,
                                   const Matrix& e0, std::int32_t depth);

namespace ref {
// Serial reference propagation, kept for testing and benchmarking against
// the parallel kernel.
Matrix propagate(const BipartiteGraph& g, NormalizationMode mode, const Matrix& x);
// Dense (M+N)x(M+N) operator assembled explicitly; test oracle for small graphs.
Matrix dense_operator(const BipartiteGraph& g, NormalizationMode mode);
}  // namespace ref

}  // namespace lrgccf

#endif
