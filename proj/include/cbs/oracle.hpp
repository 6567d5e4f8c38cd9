#pragma once
// Exhaustive reference implementation for small n: enumerates every tree
// shape (genealogy) with its exact probability and computes leaf-depth
// moments, subtree-count laws, and the pruned-tree statistics by direct
// expectation over shapes. Interleavings of split times never matter for
// these statistics, so shapes (not timed histories) are the sample space.

#include <cstdint>
#include <vector>

namespace cbs {

struct OracleStats {
    std::int64_t n = 0;
    double e_l = 0.0;             ///< mean leaf edge-depth
    double v_l = 0.0;             ///< its variance
    std::vector<double> xi;       ///< xi[t] = E[#nodes with t leaves]/n, t = 0..n
    std::vector<double> e_s;      ///< e_s[t] = E[S_{n,t}], t = 0..n (0 for t < 2)
    std::vector<double> e_sstar;  ///< e_sstar[t] = E[S*_{n,t}], same layout
};

/// Full enumeration; shape count grows like the Catalan-type recursion
/// s(m) = sum s(i) s(m-i) (429 shapes at m = 8), so n is capped at 9.
OracleStats enumerate_oracle(std::int64_t n);

}  // namespace cbs
