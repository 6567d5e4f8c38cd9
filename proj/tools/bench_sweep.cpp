// Benchmarks the O(n^2) mean sweep and the tree sampler so acceptance-suite
// budgets can be sized for a given machine. Usage: bench_sweep [n_max].

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "cbs/constants.hpp"
#include "cbs/rng.hpp"
#include "cbs/sampler.hpp"
#include "cbs/series.hpp"

int main(int argc, char** argv) {
    const std::int64_t n_max = argc > 1 ? std::atoll(argv[1]) : 100000;
    using clock = std::chrono::steady_clock;

    cbs::HarmonicTable table(n_max);
    const auto t0 = clock::now();
    const auto e_d = cbs::d_mean_only(table, n_max);
    const double sweep_s = std::chrono::duration<double>(clock::now() - t0).count();
    const double terms = 0.5 * static_cast<double>(n_max) * static_cast<double>(n_max);
    std::printf("d_mean_only  n_max=%lld  %.2fs  (%.2f ns/term)  e_d[n_max]=%.12f\n",
                static_cast<long long>(n_max), sweep_s, 1e9 * sweep_s / terms,
                e_d[static_cast<std::size_t>(n_max)]);

    const std::int64_t tree_n = 10000, trees = 200;
    const auto t1 = clock::now();
    double acc = 0.0;
    for (std::int64_t i = 0; i < trees; ++i) {
        cbs::RngStream rng(1, static_cast<std::uint64_t>(i));
        const cbs::TreeArena arena = cbs::build_tree(table, tree_n, rng);
        acc += cbs::tree_heights(arena).max_d;
    }
    const double tree_s = std::chrono::duration<double>(clock::now() - t1).count();
    std::printf("build_tree   n=%lld  %lld trees  %.2fs  (%.2f us/tree)  mean maxD=%.4f\n",
                static_cast<long long>(tree_n), static_cast<long long>(trees), tree_s,
                1e6 * tree_s / static_cast<double>(trees),
                acc / static_cast<double>(trees));
    return 0;
}
