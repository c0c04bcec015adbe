// Benchmark: OpenMP propagation kernel vs the serial reference on a random
// bipartite graph. Run: bench_propagate [users items edges dim reps]

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <random>

#include "lrgccf/graph.hpp"

using namespace lrgccf;

int main(int argc, char** argv) {
    std::int32_t users = argc > 1 ? std::atoi(argv[1]) : 20000;
    std::int32_t items = argc > 2 ? std::atoi(argv[2]) : 20000;
    std::int64_t edges = argc > 3 ? std::atoll(argv[3]) : 500000;
    std::int32_t dim = argc > 4 ? std::atoi(argv[4]) : 64;
    int reps = argc > 5 ? std::atoi(argv[5]) : 20;

    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::int32_t> udist(0, users - 1), idist(0, items - 1);
    IndexedDataset ds;
    ds.num_users = users;
    ds.num_items = items;
    for (std::int64_t e = 0; e < edges; ++e) ds.train.emplace_back(udist(rng), idist(rng));
    // every node needs at least contiguous coverage for build_graph
    for (std::int32_t u = 0; u < users; ++u) ds.train.emplace_back(u, idist(rng));
    for (std::int32_t i = 0; i < items; ++i) ds.train.emplace_back(udist(rng), i);
    BipartiteGraph g = build_graph(ds);

    Matrix x(static_cast<std::size_t>(users) + static_cast<std::size_t>(items),
             static_cast<std::size_t>(dim));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : x.data) v = gauss(rng);

    std::cout << "graph: M=" << users << " N=" << items << " edges=" << g.edge_count()
              << " D=" << dim << " threads=" << omp_get_max_threads() << "\n";

    for (auto mode : {NormalizationMode::PaperPerNode, NormalizationMode::SymmetricSqrt}) {
        double t0 = omp_get_wtime();
        Matrix serial_out;
        for (int r = 0; r < reps; ++r) serial_out = ref::propagate(g, mode, x);
        double serial_s = (omp_get_wtime() - t0) / reps;

        t0 = omp_get_wtime();
        Matrix parallel_out;
        for (int r = 0; r < reps; ++r) parallel_out = propagate(g, mode, x);
        double parallel_s = (omp_get_wtime() - t0) / reps;

        double max_diff = 0.0;
        for (std::size_t idx = 0; idx < serial_out.data.size(); ++idx)
            max_diff = std::max(max_diff,
                                std::abs(serial_out.data[idx] - parallel_out.data[idx]));

        std::cout << to_string(mode) << ": serial " << serial_s * 1e3 << " ms, parallel "
                  << parallel_s * 1e3 << " ms, speedup " << serial_s / parallel_s
                  << "x, max |diff| " << max_diff << "\n";
    }
    return 0;
}
