#include "lrgccf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lrgccf {

std::vector<std::int32_t> rank_user(const EmbeddingState& state, const IndexedDataset& ds,
                                    std::int32_t u, std::int32_t n_max, EvalSplit split,
                                    bool residual) {
    std::vector<double> scores = score_all_items(state, u, residual);

    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (std::int32_t i : ds.user_train_items[static_cast<std::size_t>(u)])
        scores[static_cast<std::size_t>(i)] = neg_inf;
    if (split == EvalSplit::Test)
        for (const auto& [vu, vi] : ds.val)
            if (vu == u) scores[static_cast<std::size_t>(vi)] = neg_inf;

    const auto n = static_cast<std::int32_t>(scores.size());
    const auto k = std::min(n_max, n);
    std::vector<std::int32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    // score descending, index ascending on ties
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](std::int32_t a, std::int32_t b) {
                          const double sa = scores[static_cast<std::size_t>(a)];
                          const double sb = scores[static_cast<std::size_t>(b)];
                          return sa != sb ? sa > sb : a < b;
                      });
    order.resize(static_cast<std::size_t>(k));
    // masked items never appear in the output
    while (!order.empty() && scores[static_cast<std::size_t>(order.back())] == neg_inf)
        order.pop_back();
    return order;
}

double hr_at_n(const std::vector<std::int32_t>& top_n,
               const std::vector<std::int32_t>& positives_sorted) {
    if (positives_sorted.empty()) throw Error("hr_at_n: user has no positives");
    std::int32_t hits = 0;
    for (std::int32_t i : top_n)
        if (std::binary_search(positives_sorted.begin(), positives_sorted.end(), i)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(positives_sorted.size());
}

double ndcg_at_n(const std::vector<std::int32_t>& top_n,
                 const std::vector<std::int32_t>& positives_sorted) {
    if (positives_sorted.empty()) throw Error("ndcg_at_n: user has no positives");
    double dcg = 0.0;
    for (std::size_t p = 0; p < top_n.size(); ++p)
        if (std::binary_search(positives_sorted.begin(), positives_sorted.end(), top_n[p]))
            dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    const std::size_t ideal = std::min(top_n.size(), positives_sorted.size());
    double idcg = 0.0;
    for (std::size_t p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

MetricsReport evaluate(const EmbeddingState& state, const IndexedDataset& ds, EvalSplit split,
                       bool residual, const std::vector<std::int32_t>& top_ns) {
    const auto& records = split == EvalSplit::Val ? ds.val : ds.test;
    if (records.empty()) throw Error("evaluate: split is empty");

    std::vector<std::vector<std::int32_t>> positives(
        static_cast<std::size_t>(ds.num_users));
    for (const auto& [u, i] : records) positives[static_cast<std::size_t>(u)].push_back(i);
    for (auto& p : positives) std::sort(p.begin(), p.end());

    std::vector<std::int32_t> users;
    for (std::int32_t u = 0; u < ds.num_users; ++u)
        if (!positives[static_cast<std::size_t>(u)].empty()) users.push_back(u);

    const std::int32_t n_max = *std::max_element(top_ns.begin(), top_ns.end());
    std::vector<double> hr_sums(top_ns.size(), 0.0), ndcg_sums(top_ns.size(), 0.0);

    // Parallel over users; per-user rows gathered first so the final
    // reduction runs in fixed user order.
    const auto nu = static_cast<std::int64_t>(users.size());
    std::vector<std::vector<double>> per_user(users.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t idx = 0; idx < nu; ++idx) {
        const std::int32_t u = users[static_cast<std::size_t>(idx)];
        const auto top = rank_user(state, ds, u, n_max, split, residual);
        const auto& pos = positives[static_cast<std::size_t>(u)];
        std::vector<double> row(2 * top_ns.size());
        for (std::size_t t = 0; t < top_ns.size(); ++t) {
            std::vector<std::int32_t> head(
                top.begin(),
                top.begin() + std::min<std::size_t>(static_cast<std::size_t>(top_ns[t]),
                                                    top.size()));
            row[2 * t] = hr_at_n(head, pos);
            row[2 * t + 1] = ndcg_at_n(head, pos);
        }
        per_user[static_cast<std::size_t>(idx)] = std::move(row);
    }
    for (const auto& row : per_user)
        for (std::size_t t = 0; t < top_ns.size(); ++t) {
            hr_sums[t] += row[2 * t];
            ndcg_sums[t] += row[2 * t + 1];
        }

    MetricsReport report;
    report.user_count = static_cast<std::int32_t>(users.size());
    const auto denom = static_cast<double>(users.size());
    for (std::size_t t = 0; t < top_ns.size(); ++t)
        report.rows.push_back({top_ns[t], hr_sums[t] / denom, ndcg_sums[t] / denom});
    return report;
}

namespace {

struct MeanVar {
    double mean;
    double var;
};

// Sample `count` distinct index pairs from [lo, hi); compute cosine mean/var
// at the given layer, skipping pairs with a zero-norm member.
MeanVar sampled_cosine(const Matrix& layer, std::size_t lo, std::size_t hi,
                       std::int32_t count, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dist(lo, hi - 1);
    const std::size_t d = layer.cols;
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t taken = 0;
    std::int64_t attempts = 0;
    const std::int64_t max_attempts = static_cast<std::int64_t>(count) * 100;
    while (taken < count && attempts < max_attempts) {
        ++attempts;
        const std::size_t a = dist(rng);
        const std::size_t b = dist(rng);
        if (a == b) continue;
        const double na = std::sqrt(dot(layer.row(a), layer.row(a), d));
        const double nb = std::sqrt(dot(layer.row(b), layer.row(b), d));
        if (na == 0.0 || nb == 0.0) continue;
        const double sim = dot(layer.row(a), layer.row(b), d) / (na * nb);
        sum += sim;
        sum_sq += sim * sim;
        ++taken;
    }
    if (taken == 0) throw Error("smoothness: no valid pairs sampled");
    const double mean = sum / static_cast<double>(taken);
    const double var = std::max(0.0, sum_sq / static_cast<double>(taken) - mean * mean);
    return {mean, var};
}

}  // namespace

SmoothnessReport smoothness(const EmbeddingState& state, std::int32_t pair_sample,
                            std::mt19937_64& rng) {
    if (state.num_users < 2 || state.num_items < 2)
        throw Error("smoothness needs at least 2 users and 2 items");
    if (state.layers.empty()) throw Error("layers not computed; call refresh_layers first");
    const auto m = static_cast<std::size_t>(state.num_users);
    const auto n = static_cast<std::size_t>(state.num_items);
    SmoothnessReport report;
    report.pair_sample = pair_sample;
    for (std::int32_t k = 0; k <= state.depth; ++k) {
        const Matrix& layer = state.layers[static_cast<std::size_t>(k)];
        const MeanVar us = sampled_cosine(layer, 0, m, pair_sample, rng);
        const MeanVar is = sampled_cosine(layer, m, m + n, pair_sample, rng);
        report.rows.push_back({k, us.mean, us.var, is.mean, is.var});
    }
    return report;
}

}  // namespace lrgccf
