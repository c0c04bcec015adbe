#ifndef LRGCCF_MODEL_HPP_
#define LRGCCF_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lrgccf/graph.hpp"
#include "lrgccf/matrix.hpp"

namespace lrgccf {

struct ModelConfig {
    std::int32_t depth = 3;       // K
    std::int32_t dim = 64;        // D
    NormalizationMode mode = NormalizationMode::PaperPerNode;
    bool residual = true;
    // When true, a learned DxD transform is applied after each hop.
    // Identity (false) matches the best reported setting and is the default.
    bool learn_transform = false;
    std::vector<Matrix> transforms;  // K matrices, used only when learn_transform
};

struct EmbeddingState {
    Matrix e0;                   // (M+N) x D
    std::vector<Matrix> layers;  // [E^0 .. E^K], refreshed after every e0 update
    std::int32_t num_users = 0;
    std::int32_t num_items = 0;
    std::int32_t depth = 0;
    std::int32_t dim = 0;

    const double* user_layer(std::int32_t k, std::int32_t u) const {
        return layers[static_cast<std::size_t>(k)].row(static_cast<std::size_t>(u));
    }
    const double* item_layer(std::int32_t k, std::int32_t i) const {
        return layers[static_cast<std::size_t>(k)].row(
            static_cast<std::size_t>(num_users) + static_cast<std::size_t>(i));
    }
};

// Entries i.i.d. Normal(0, std 0.01) from the seeded generator.
EmbeddingState init_embeddings(std::int32_t num_users, std::int32_t num_items,
                               std::int32_t dim, std::uint64_t seed);

// Recomputes layers[1..K] from e0 for the bound graph and config.
void refresh_layers(EmbeddingState& state, const BipartiteGraph& g, const ModelConfig& cfg);

// residual: sum_k <e_u^k, e_i^k>; otherwise <e_u^K, e_i^K>.
double score(const EmbeddingState& state, std::int32_t u, std::int32_t i, bool residual);

// e^0 || e^1 || ... || e^K for a node index in [0, M+N).
std::vector<double> final_embedding(const EmbeddingState& state, std::int32_t node);

// Entry i equals score(state, u, i, residual); one pass over stacked item rows.
std::vector<double> score_all_items(const EmbeddingState& state, std::int32_t u, bool residual);

// Checkpoint: text header "LRGCCF v1 M N D K mode residual", then E0 as
// little-endian doubles, row-major. Layers are recomputable and not stored.
void save_checkpoint(const EmbeddingState& state, const ModelConfig& cfg,
                     const std::string& path);
struct Checkpoint {
    EmbeddingState state;  // layers empty until refresh_layers
    ModelConfig config;    // depth, dim, mode, residual from the header
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lrgccf

#endif
