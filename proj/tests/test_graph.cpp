#include <doctest.h>

#include <numeric>
#include <random>

#include "helpers.hpp"
#include "lrgccf/graph.hpp"

using namespace lrgccf;
using namespace testutil;

namespace {

IndexedDataset three_edge_dataset() {
    IndexedDataset ds;
    ds.num_users = 2;
    ds.num_items = 2;
    ds.train = {{0, 0}, {0, 1}, {1, 0}};
    ds.user_train_items = {{0, 1}, {0}};
    return ds;
}

}  // namespace

TEST_CASE("build_graph degrees include the self loop") {
    auto g = build_graph(three_edge_dataset());
    CHECK(g.d_user == std::vector<std::int32_t>{3, 2});
    CHECK(g.d_item == std::vector<std::int32_t>{3, 2});
}

TEST_CASE("build_graph single edge") {
    IndexedDataset ds;
    ds.num_users = 1;
    ds.num_items = 1;
    ds.train = {{0, 0}};
    ds.user_train_items = {{0}};
    auto g = build_graph(ds);
    CHECK(g.d_user == std::vector<std::int32_t>{2});
    CHECK(g.d_item == std::vector<std::int32_t>{2});
}

TEST_CASE("build_graph rejects an empty train set") {
    IndexedDataset ds;
    ds.num_users = 1;
    ds.num_items = 1;
    CHECK_THROWS_AS(build_graph(ds), Error);
}

TEST_CASE("u2i and i2u are transposes and edge counts agree") {
    std::mt19937_64 rng(11);
    auto ds = random_dataset(15, 12, 60, rng);
    auto g = build_graph(ds);
    std::int64_t u_edges = 0, i_edges = 0;
    for (std::int32_t u = 0; u < g.num_users; ++u) {
        for (std::int64_t e = g.u2i_offsets[u]; e < g.u2i_offsets[u + 1]; ++e) {
            const std::int32_t i = g.u2i_items[static_cast<std::size_t>(e)];
            bool found = false;
            for (std::int64_t e2 = g.i2u_offsets[i]; e2 < g.i2u_offsets[i + 1]; ++e2)
                if (g.i2u_users[static_cast<std::size_t>(e2)] == u) found = true;
            CHECK(found);
            ++u_edges;
        }
    }
    i_edges = static_cast<std::int64_t>(g.i2u_users.size());
    CHECK(u_edges == i_edges);
    CHECK(u_edges == static_cast<std::int64_t>(ds.train.size()));
}

TEST_CASE("propagate hand example: 3-edge graph, paper coefficients") {
    auto g = build_graph(three_edge_dataset());
    Matrix x(4, 1);
    // rows: u0, u1, i0, i1
    x.at(0, 0) = 1.0;
    x.at(1, 0) = 10.0;
    x.at(2, 0) = 100.0;
    x.at(3, 0) = 1000.0;
    auto out = propagate(g, NormalizationMode::PaperPerNode, x);
    // x'_{u0} = (1/3)x_u0 + (1/9)x_i0 + (1/6)x_i1
    CHECK(out.at(0, 0) == doctest::Approx(1.0 / 3 + 100.0 / 9 + 1000.0 / 6).epsilon(1e-14));
    // x'_{u1} = (1/2)x_u1 + (1/6)x_i0
    CHECK(out.at(1, 0) == doctest::Approx(10.0 / 2 + 100.0 / 6).epsilon(1e-14));
}

TEST_CASE("propagate of zeros is zeros") {
    std::mt19937_64 rng(3);
    auto g = build_graph(random_dataset(8, 6, 20, rng));
    Matrix x(14, 3);
    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
        auto out = propagate(g, mode, x);
        for (double v : out.data) CHECK(v == 0.0);
    }
}

TEST_CASE("propagate rejects shape mismatches") {
    std::mt19937_64 rng(4);
    auto g = build_graph(random_dataset(5, 5, 10, rng));
    Matrix x(9, 2);
    CHECK_THROWS_AS(propagate(g, NormalizationMode::PaperPerNode, x), Error);
}

TEST_CASE("propagate matches the dense operator oracle on small graphs") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<std::int32_t> sz(2, 25);
        auto ds = random_dataset(sz(rng), sz(rng), 40, rng);
        auto g = build_graph(ds);
        auto x = random_matrix(static_cast<std::size_t>(g.node_count()), 4, rng);
        for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
            auto dense = dense_multiply(ref::dense_operator(g, mode), x);
            CHECK(max_abs_diff(propagate(g, mode, x), dense) < 1e-12);
            CHECK(max_abs_diff(ref::propagate(g, mode, x), dense) < 1e-12);
        }
    }
}

TEST_CASE("compute_layers K=0 returns only E0; K=2 matches dense P(PX)") {
    std::mt19937_64 rng(31);
    auto g = build_graph(random_dataset(10, 9, 30, rng));
    auto e0 = random_matrix(19, 5, rng);
    auto only = compute_layers(g, NormalizationMode::PaperPerNode, e0, 0);
    REQUIRE(only.size() == 1);
    CHECK(max_abs_diff(only[0], e0) == 0.0);

    auto layers = compute_layers(g, NormalizationMode::SymmetricSqrt, e0, 2);
    REQUIRE(layers.size() == 3);
    auto p = ref::dense_operator(g, NormalizationMode::SymmetricSqrt);
    auto expect = dense_multiply(p, dense_multiply(p, e0));
    CHECK(max_abs_diff(layers[2], expect) < 1e-12);
}

TEST_CASE("one-hot propagation support is the closed neighborhood") {
    auto g = build_graph(three_edge_dataset());
    Matrix x(4, 1);
    x.at(0, 0) = 1.0;  // one-hot on u0
    auto out = propagate(g, NormalizationMode::PaperPerNode, x);
    CHECK(out.at(0, 0) != 0.0);  // self
    CHECK(out.at(1, 0) == 0.0);  // u1 not adjacent to u0
    CHECK(out.at(2, 0) != 0.0);  // i0 in R_u0
    CHECK(out.at(3, 0) != 0.0);  // i1 in R_u0
}

TEST_CASE("propagate is linear") {
    std::mt19937_64 rng(41);
    auto g = build_graph(random_dataset(12, 10, 35, rng));
    auto x = random_matrix(22, 3, rng);
    auto y = random_matrix(22, 3, rng);
    const double a = 0.37, b = -1.91;
    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
        Matrix combo(22, 3);
        for (std::size_t idx = 0; idx < combo.data.size(); ++idx)
            combo.data[idx] = a * x.data[idx] + b * y.data[idx];
        auto lhs = propagate(g, mode, combo);
        auto px = propagate(g, mode, x);
        auto py = propagate(g, mode, y);
        Matrix rhs(22, 3);
        for (std::size_t idx = 0; idx < rhs.data.size(); ++idx)
            rhs.data[idx] = a * px.data[idx] + b * py.data[idx];
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("adjointness <PX, Y> == <X, P^T Y> in both modes") {
    std::mt19937_64 rng(51);
    auto g = build_graph(random_dataset(9, 11, 30, rng));
    auto x = random_matrix(20, 4, rng);
    auto y = random_matrix(20, 4, rng);
    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
        auto px = propagate(g, mode, x);
        auto pty = propagate_transpose(g, mode, y);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t idx = 0; idx < x.data.size(); ++idx) {
            lhs += px.data[idx] * y.data[idx];
            rhs += x.data[idx] * pty.data[idx];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("symmetric-sqrt transpose equals the forward hop") {
    std::mt19937_64 rng(61);
    auto g = build_graph(random_dataset(7, 8, 25, rng));
    auto x = random_matrix(15, 3, rng);
    auto fwd = propagate(g, NormalizationMode::SymmetricSqrt, x);
    auto bwd = propagate_transpose(g, NormalizationMode::SymmetricSqrt, x);
    CHECK(max_abs_diff(fwd, bwd) == 0.0);
}

TEST_CASE("transpose of zeros is zeros") {
    std::mt19937_64 rng(62);
    auto g = build_graph(random_dataset(5, 6, 12, rng));
    Matrix x(11, 2);
    auto out = propagate_transpose(g, NormalizationMode::PaperPerNode, x);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("propagation commutes with user relabeling") {
    std::mt19937_64 rng(71);
    auto ds = random_dataset(10, 8, 30, rng);
    auto g = build_graph(ds);
    auto x = random_matrix(18, 3, rng);

    // permute users
    std::vector<std::int32_t> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    IndexedDataset pds = ds;
    for (auto& [u, i] : pds.train) u = perm[static_cast<std::size_t>(u)];
    pds.user_train_items.assign(10, {});
    for (const auto& [u, i] : pds.train)
        pds.user_train_items[static_cast<std::size_t>(u)].push_back(i);
    auto pg = build_graph(pds);

    Matrix px(18, 3);
    for (std::int32_t u = 0; u < 10; ++u)
        for (std::size_t c = 0; c < 3; ++c)
            px.at(static_cast<std::size_t>(perm[static_cast<std::size_t>(u)]), c) =
                x.at(static_cast<std::size_t>(u), c);
    for (std::size_t r = 10; r < 18; ++r)
        for (std::size_t c = 0; c < 3; ++c) px.at(r, c) = x.at(r, c);

    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
        auto out = propagate(g, mode, x);
        auto pout = propagate(pg, mode, px);
        for (std::int32_t u = 0; u < 10; ++u)
            for (std::size_t c = 0; c < 3; ++c)
                CHECK(out.at(static_cast<std::size_t>(u), c) ==
                      doctest::Approx(pout.at(
                          static_cast<std::size_t>(perm[static_cast<std::size_t>(u)]), c))
                          .epsilon(1e-13));
    }
}

TEST_CASE("locality: one hop reaches only distance-1 nodes") {
    // u0-i0, u1-i0, u1-i1, u2-i1: u2 is distance 4 from u0
    IndexedDataset ds;
    ds.num_users = 3;
    ds.num_items = 2;
    ds.train = {{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    ds.user_train_items = {{0}, {0, 1}, {1}};
    auto g = build_graph(ds);
    Matrix x(5, 1);
    x.at(0, 0) = 1.0;  // mass on u0 only
    auto h1 = propagate(g, NormalizationMode::PaperPerNode, x);
    CHECK(h1.at(1, 0) == 0.0);  // u1 is distance 2
    CHECK(h1.at(4, 0) == 0.0);  // i1 is distance 3
    auto h2 = propagate(g, NormalizationMode::PaperPerNode, h1);
    CHECK(h2.at(1, 0) != 0.0);
    CHECK(h2.at(2, 0) == 0.0);  // u2 is distance 4
}

TEST_CASE("parallel and serial kernels agree bitwise") {
    std::mt19937_64 rng(81);
    auto g = build_graph(random_dataset(40, 35, 300, rng));
    auto x = random_matrix(75, 8, rng);
    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt})
        CHECK(max_abs_diff(propagate(g, mode, x), ref::propagate(g, mode, x)) == 0.0);
}
