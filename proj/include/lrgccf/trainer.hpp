#ifndef LRGCCF_TRAINER_HPP_
#define LRGCCF_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lrgccf/dataset.hpp"
#include "lrgccf/model.hpp"

namespace lrgccf {

struct TrainTriplet {
    std::int32_t user;      // a
    std::int32_t pos_item;  // i in R_a
    std::int32_t neg_item;  // j not in R_a
};

struct TrainConfig {
    double lr = 0.005;
    double lambda = 0.01;
    std::int32_t epochs = 400;
    std::int32_t batch_size = 2048;
    std::int32_t negatives_per_positive = 1;
    std::uint64_t seed = 0;
    std::int32_t early_stop_patience = 10;  // evaluations without improvement
    std::int32_t eval_every = 5;            // epochs between validation evals
};

// One triplet per (train positive, negative draw); negatives rejection-sampled
// uniformly until j is outside R_a; users rated on every item are skipped.
// Output order is shuffled by rng.
std::vector<TrainTriplet> sample_epoch(const IndexedDataset& ds, std::mt19937_64& rng,
                                       std::int32_t negatives_per_positive);

// sum over triplets of softplus(-(r_ai - r_aj)) + lambda * ||E0||^2.
double bpr_loss(const std::vector<TrainTriplet>& batch, const EmbeddingState& state,
                const ModelConfig& mcfg, double lambda);

// Exact d/dE0 of [mean over batch of softplus(-(r_ai - r_aj)) + lambda*||E0||^2].
// Layer-k scatter contributions are accumulated densely, then pulled back to
// E0 with repeated transpose propagation. Empty batch gives 2*lambda*E0.
Matrix gradient(const std::vector<TrainTriplet>& batch, const EmbeddingState& state,
                const BipartiteGraph& g, const ModelConfig& mcfg, double lambda);

struct EpochStats {
    std::int32_t epoch;
    double loss;
    double val_hr20;    // NaN until the first evaluation
    double val_ndcg20;
};

struct ValMetrics {
    double hr20;
    double ndcg20;
};
using EvalHook = std::function<ValMetrics(const EmbeddingState&)>;

struct TrainResult {
    EmbeddingState best;   // snapshot with the highest validation NDCG@20
    std::vector<EpochStats> history;
    std::int32_t best_epoch = 0;
};

// SGD over epochs of sampled triplets; early-stops when validation NDCG@20
// fails to improve for `early_stop_patience` evaluations. Throws
// NumericalError naming epoch and batch if E0 goes non-finite.
TrainResult train(const IndexedDataset& ds, const BipartiteGraph& g,
                  const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const EvalHook& eval_hook);

}  // namespace lrgccf

#endif
