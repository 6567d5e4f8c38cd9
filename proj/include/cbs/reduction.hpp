#pragma once
// Deterministic floating-point reduction primitives.
//
// Two summation disciplines are used in this codebase, each chosen for a
// reproducibility contract rather than raw accuracy:
//
// 1. Recurrence row sums (series.cpp) iterate k DESCENDING and accumulate
//    sequentially. For the constant sequence x == 1 the terms are then
//    1/1 + 1/2 + ... + 1/(n-1), the exact addition order used to build the
//    harmonic table, so the sum equals h[n-1] bit-for-bit. That makes the
//    u = 0 transform normalization phi_n(0) == 1.0 exact at every n, and it
//    keeps every series byte-identical across runs.
//
// 2. Free-standing sums (logratio_sum) and Monte Carlo accumulator merges
//    use fixed 4096-element blocks combined by a pairwise tree. The block
//    structure depends only on the index range, never on the worker count,
//    so parallel runs reproduce the serial result bit-for-bit.

#include <cstddef>
#include <vector>

namespace cbs {

inline constexpr std::size_t kReductionBlock = 4096;

/// Pairwise tree sum of term(i) for i in [0, count): terms are accumulated
/// sequentially inside fixed 4096-element blocks, then block partials are
/// combined by halving passes. Deterministic for a given count.
template <typename TermFn>
double block_pairwise_sum(std::size_t count, TermFn&& term) {
    if (count == 0) return 0.0;
    std::vector<double> partial;
    partial.reserve(count / kReductionBlock + 1);
    std::size_t i = 0;
    while (i < count) {
        const std::size_t stop = std::min(count, i + kReductionBlock);
        double acc = 0.0;
        for (; i < stop; ++i) acc += term(i);
        partial.push_back(acc);
    }
    while (partial.size() > 1) {
        std::size_t half = (partial.size() + 1) / 2;
        for (std::size_t j = 0; j + half < partial.size(); ++j)
            partial[j] += partial[j + half];
        partial.resize(half);
    }
    return partial[0];
}

/// Recurrence inner sum  sum_{k=1}^{n-1} x[k] * inv[n-k], accumulated with
/// k descending (terms x[n-1]*inv[1], x[n-2]*inv[2], ..., x[1]*inv[n-1]).
/// See file comment for why this order is load-bearing.
inline double row_sum_desc(const double* x, const double* inv, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = n - 1; k >= 1; --k) acc += x[k] * inv[n - k];
    return acc;
}

}  // namespace cbs
