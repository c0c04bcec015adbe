#include "lrgccf/model.hpp"

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace lrgccf {

EmbeddingState init_embeddings(std::int32_t num_users, std::int32_t num_items,
                               std::int32_t dim, std::uint64_t seed) {
    if (dim < 1) throw Error("embedding dimension must be >= 1");
    EmbeddingState st;
    st.num_users = num_users;
    st.num_items = num_items;
    st.dim = dim;
    st.e0 = Matrix(static_cast<std::size_t>(num_users) + static_cast<std::size_t>(num_items),
                   static_cast<std::size_t>(dim));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.01);
    for (double& v : st.e0.data) v = gauss(rng);
    return st;
}

void refresh_layers(EmbeddingState& state, const BipartiteGraph& g, const ModelConfig& cfg) {
    if (state.e0.rows != static_cast<std::size_t>(g.node_count()))
        throw Error("embedding rows do not match graph node count");
    state.depth = cfg.depth;
    if (!cfg.learn_transform) {
        state.layers = compute_layers(g, cfg.mode, state.e0, cfg.depth);
        return;
    }
    if (static_cast<std::int32_t>(cfg.transforms.size()) != cfg.depth)
        throw Error("learn_transform requires one DxD matrix per hop");
    state.layers.clear();
    state.layers.push_back(state.e0);
    const std::size_t d = state.e0.cols;
    for (std::int32_t k = 0; k < cfg.depth; ++k) {
        Matrix prop = propagate(g, cfg.mode, state.layers.back());
        const Matrix& w = cfg.transforms[static_cast<std::size_t>(k)];
        if (w.rows != d || w.cols != d) throw Error("transform matrix must be DxD");
        Matrix next(prop.rows, d);
        for (std::size_t r = 0; r < prop.rows; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                double s = 0.0;
                for (std::size_t t = 0; t < d; ++t) s += prop.at(r, t) * w.at(t, c);
                next.at(r, c) = s;
            }
        state.layers.push_back(std::move(next));
    }
}

namespace {

void check_pair(const EmbeddingState& st, std::int32_t u, std::int32_t i) {
    if (u < 0 || u >= st.num_users) throw Error("user index out of range");
    if (i < 0 || i >= st.num_items) throw Error("item index out of range");
    if (st.layers.empty()) throw Error("layers not computed; call refresh_layers first");
}

}  // namespace

double score(const EmbeddingState& state, std::int32_t u, std::int32_t i, bool residual) {
    check_pair(state, u, i);
    const auto d = static_cast<std::size_t>(state.dim);
    if (!residual)
        return dot(state.user_layer(state.depth, u), state.item_layer(state.depth, i), d);
    double s = 0.0;
    for (std::int32_t k = 0; k <= state.depth; ++k)
        s += dot(state.user_layer(k, u), state.item_layer(k, i), d);
    return s;
}

std::vector<double> final_embedding(const EmbeddingState& state, std::int32_t node) {
    if (node < 0 || node >= state.num_users + state.num_items)
        throw Error("node index out of range");
    if (state.layers.empty()) throw Error("layers not computed; call refresh_layers first");
    const auto d = static_cast<std::size_t>(state.dim);
    std::vector<double> out;
    out.reserve((static_cast<std::size_t>(state.depth) + 1) * d);
    for (std::int32_t k = 0; k <= state.depth; ++k) {
        const double* row = state.layers[static_cast<std::size_t>(k)].row(
            static_cast<std::size_t>(node));
        out.insert(out.end(), row, row + d);
    }
    return out;
}

std::vector<double> score_all_items(const EmbeddingState& state, std::int32_t u,
                                    bool residual) {
    check_pair(state, u, 0);
    const auto d = static_cast<std::size_t>(state.dim);
    const auto n = static_cast<std::size_t>(state.num_items);
    std::vector<double> scores(n, 0.0);
    const std::int32_t k0 = residual ? 0 : state.depth;
    for (std::int32_t k = k0; k <= state.depth; ++k) {
        const double* eu = state.user_layer(k, u);
        const Matrix& layer = state.layers[static_cast<std::size_t>(k)];
        const double* items = layer.row(static_cast<std::size_t>(state.num_users));
        for (std::size_t i = 0; i < n; ++i) scores[i] += dot(eu, items + i * d, d);
    }
    return scores;
}

void save_checkpoint(const EmbeddingState& state, const ModelConfig& cfg,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out << "LRGCCF v1 " << state.num_users << ' ' << state.num_items << ' ' << state.dim << ' '
        << cfg.depth << ' ' << to_string(cfg.mode) << ' ' << (cfg.residual ? "on" : "off")
        << '\n';
    // x86-64 doubles are already little-endian
    out.write(reinterpret_cast<const char*>(state.e0.data.data()),
              static_cast<std::streamsize>(state.e0.data.size() * sizeof(double)));
    if (!out) throw Error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read checkpoint: " + path);
    std::string header;
    if (!std::getline(in, header)) throw Error("empty checkpoint: " + path);
    std::istringstream hs(header);
    std::string magic, version, mode_str, residual_str;
    std::int32_t m, n, d, k;
    if (!(hs >> magic >> version >> m >> n >> d >> k >> mode_str >> residual_str) ||
        magic != "LRGCCF" || version != "v1")
        throw Error("bad checkpoint header in " + path);

    Checkpoint cp;
    cp.config.depth = k;
    cp.config.dim = d;
    cp.config.mode = normalization_mode_from_string(mode_str);
    cp.config.residual = residual_str == "on";
    cp.state.num_users = m;
    cp.state.num_items = n;
    cp.state.dim = d;
    cp.state.depth = k;
    cp.state.e0 = Matrix(static_cast<std::size_t>(m) + static_cast<std::size_t>(n),
                         static_cast<std::size_t>(d));
    in.read(reinterpret_cast<char*>(cp.state.e0.data.data()),
            static_cast<std::streamsize>(cp.state.e0.data.size() * sizeof(double)));
    if (in.gcount() !=
        static_cast<std::streamsize>(cp.state.e0.data.size() * sizeof(double)))
        throw Error("truncated checkpoint: " + path);
    return cp;
}

}  // namespace lrgccf
