#include "lrgccf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace lrgccf {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// -ln s(x) = softplus(-x), overflow-safe
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

std::vector<TrainTriplet> sample_epoch(const IndexedDataset& ds, std::mt19937_64& rng,
                                       std::int32_t negatives_per_positive) {
    if (negatives_per_positive < 1) throw Error("negatives_per_positive must be >= 1");
    std::uniform_int_distribution<std::int32_t> item_dist(0, ds.num_items - 1);
    std::vector<TrainTriplet> triplets;
    triplets.reserve(ds.train.size() * static_cast<std::size_t>(negatives_per_positive));
    for (const auto& [u, i] : ds.train) {
        const auto& rated = ds.user_train_items[static_cast<std::size_t>(u)];
        if (static_cast<std::int32_t>(rated.size()) >= ds.num_items) {
            static bool warned = false;
            if (!warned) {
                std::cerr << "warning: user " << u
                          << " has rated every item; no negative exists, skipping\n";
                warned = true;
            }
            continue;
        }
        for (std::int32_t r = 0; r < negatives_per_positive; ++r) {
            std::int32_t j;
            do {
                j = item_dist(rng);
            } while (std::binary_search(rated.begin(), rated.end(), j));
            triplets.push_back({u, i, j});
        }
    }
    std::shuffle(triplets.begin(), triplets.end(), rng);
    return triplets;
}

double bpr_loss(const std::vector<TrainTriplet>& batch, const EmbeddingState& state,
                const ModelConfig& mcfg, double lambda) {
    double loss = 0.0;
    for (const auto& t : batch) {
        const double x = score(state, t.user, t.pos_item, mcfg.residual) -
                         score(state, t.user, t.neg_item, mcfg.residual);
        loss += softplus(-x);
    }
    return loss + lambda * frobenius_sq(state.e0);
}

Matrix gradient(const std::vector<TrainTriplet>& batch, const EmbeddingState& state,
                const BipartiteGraph& g, const ModelConfig& mcfg, double lambda) {
    const std::size_t rows = state.e0.rows;
    const auto d = static_cast<std::size_t>(state.dim);
    const auto depth = state.depth;
    const auto m = static_cast<std::size_t>(state.num_users);

    // Per-layer scatter buffers; only layer K is touched without residual.
    const std::int32_t k0 = mcfg.residual ? 0 : depth;
    std::vector<Matrix> layer_grads;
    for (std::int32_t k = 0; k <= depth; ++k) layer_grads.emplace_back(rows, d);

    // Serial accumulation keeps the result bitwise-deterministic.
    for (const auto& t : batch) {
        const double x = score(state, t.user, t.pos_item, mcfg.residual) -
                         score(state, t.user, t.neg_item, mcfg.residual);
        const double f = sigmoid(x) - 1.0;  // d softplus(-x) / dx
        for (std::int32_t k = k0; k <= depth; ++k) {
            Matrix& gk = layer_grads[static_cast<std::size_t>(k)];
            const double* ea = state.user_layer(k, t.user);
            const double* ei = state.item_layer(k, t.pos_item);
            const double* ej = state.item_layer(k, t.neg_item);
            double* ga = gk.row(static_cast<std::size_t>(t.user));
            double* gi = gk.row(m + static_cast<std::size_t>(t.pos_item));
            double* gj = gk.row(m + static_cast<std::size_t>(t.neg_item));
            for (std::size_t c = 0; c < d; ++c) {
                ga[c] += f * (ei[c] - ej[c]);
                gi[c] += f * ea[c];
                gj[c] -= f * ea[c];
            }
        }
    }

    // Pull layer-k contributions back to E0: grad = sum_k (P^T)^k G^k.
    Matrix acc = std::move(layer_grads[static_cast<std::size_t>(depth)]);
    for (std::int32_t k = depth - 1; k >= 0; --k) {
        acc = propagate_transpose(g, mcfg.mode, acc);
        const Matrix& gk = layer_grads[static_cast<std::size_t>(k)];
        for (std::size_t idx = 0; idx < acc.data.size(); ++idx) acc.data[idx] += gk.data[idx];
    }

    const double inv_batch = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (std::size_t idx = 0; idx < acc.data.size(); ++idx)
        acc.data[idx] = acc.data[idx] * inv_batch + 2.0 * lambda * state.e0.data[idx];
    return acc;
}

TrainResult train(const IndexedDataset& ds, const BipartiteGraph& g, const ModelConfig& mcfg,
                  const TrainConfig& tcfg, const EvalHook& eval_hook) {
    if (tcfg.lr < 0.0) throw Error("learning rate must be >= 0");
    if (tcfg.lambda < 0.0) throw Error("lambda must be >= 0");
    if (tcfg.batch_size < 1) throw Error("batch size must be >= 1");

    EmbeddingState state = init_embeddings(ds.num_users, ds.num_items, mcfg.dim,
                                           sub_seed(tcfg.seed, "init"));
    refresh_layers(state, g, mcfg);
    std::mt19937_64 sample_rng(sub_seed(tcfg.seed, "sampling"));

    TrainResult result;
    result.best = state;
    double best_ndcg = -1.0;
    std::int32_t evals_since_improve = 0;
    double last_hr = std::nan("");
    double last_ndcg = std::nan("");

    for (std::int32_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
        auto triplets = sample_epoch(ds, sample_rng, tcfg.negatives_per_positive);
        double data_loss = 0.0;
        const auto bs = static_cast<std::size_t>(tcfg.batch_size);
        for (std::size_t start = 0; start < triplets.size(); start += bs) {
            const auto end = std::min(start + bs, triplets.size());
            std::vector<TrainTriplet> batch(triplets.begin() + static_cast<std::ptrdiff_t>(start),
                                            triplets.begin() + static_cast<std::ptrdiff_t>(end));
            data_loss += bpr_loss(batch, state, mcfg, 0.0);
            Matrix grad = gradient(batch, state, g, mcfg, tcfg.lambda);
            for (std::size_t idx = 0; idx < state.e0.data.size(); ++idx)
                state.e0.data[idx] -= tcfg.lr * grad.data[idx];
            if (!all_finite(state.e0))
                throw NumericalError("non-finite embedding at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(start / bs));
            refresh_layers(state, g, mcfg);
        }
        const double epoch_loss =
            (triplets.empty() ? 0.0 : data_loss / static_cast<double>(triplets.size())) +
            tcfg.lambda * frobenius_sq(state.e0);

        if (eval_hook && tcfg.eval_every > 0 && epoch % tcfg.eval_every == 0) {
            const ValMetrics vm = eval_hook(state);
            last_hr = vm.hr20;
            last_ndcg = vm.ndcg20;
            if (vm.ndcg20 > best_ndcg) {
                best_ndcg = vm.ndcg20;
                result.best = state;
                result.best_epoch = epoch;
                evals_since_improve = 0;
            } else if (++evals_since_improve >= tcfg.early_stop_patience) {
                result.history.push_back({epoch, epoch_loss, last_hr, last_ndcg});
                return result;
            }
        }
        result.history.push_back({epoch, epoch_loss, last_hr, last_ndcg});
    }
    if (best_ndcg < 0.0) {
        // never evaluated: keep the final state
        result.best = state;
        result.best_epoch = tcfg.epochs;
    }
    return result;
}

}  // namespace lrgccf
