#ifndef LRGCCF_EVAL_HPP_
#define LRGCCF_EVAL_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "lrgccf/dataset.hpp"
#include "lrgccf/model.hpp"

namespace lrgccf {

enum class EvalSplit { Val, Test };

struct MetricsAtN {
    std::int32_t n;
    double hr;
    double ndcg;
};

struct MetricsReport {
    std::vector<MetricsAtN> rows;
    std::int32_t user_count = 0;  // users with >=1 positive in the split
};

struct SmoothnessRow {
    std::int32_t layer;
    double user_sim_mean;
    double user_sim_var;
    double item_sim_mean;
    double item_sim_var;
};

struct SmoothnessReport {
    std::vector<SmoothnessRow> rows;  // one per layer 0..K
    std::int32_t pair_sample = 0;
};

// Top-n_max items for user u by residual score; masks the user's train
// positives (and validation positives when evaluating test). Ties break by
// ascending item index.
std::vector<std::int32_t> rank_user(const EmbeddingState& state, const IndexedDataset& ds,
                                    std::int32_t u, std::int32_t n_max, EvalSplit split,
                                    bool residual);

// Per-user recall: |topN ∩ test positives| / |test positives|.
double hr_at_n(const std::vector<std::int32_t>& top_n,
               const std::vector<std::int32_t>& positives_sorted);

// Binary-gain NDCG with 1/log2(p+1) discount, normalized by the ideal ranking.
double ndcg_at_n(const std::vector<std::int32_t>& top_n,
                 const std::vector<std::int32_t>& positives_sorted);

// HR/NDCG averaged over users with >=1 positive in the split.
MetricsReport evaluate(const EmbeddingState& state, const IndexedDataset& ds, EvalSplit split,
                       bool residual, const std::vector<std::int32_t>& top_ns = {10, 20, 30,
                                                                                 40, 50});

// Per-layer cosine-similarity mean/variance over `pair_sample` sampled
// distinct user pairs and item pairs; zero-norm vectors are excluded.
SmoothnessReport smoothness(const EmbeddingState& state, std::int32_t pair_sample,
                            std::mt19937_64& rng);

}  // namespace lrgccf

#endif
