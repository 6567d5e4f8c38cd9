#pragma once
// Exact samplers for the continuous-time critical beta-splitting process:
// single-leaf path chains, two-leaf joint chains, t-leaf occupancy chains,
// and full tree arenas. All samplers are pure functions of (parameters,
// RngStream); the harmonic table is shared read-only.

#include <cstdint>
#include <vector>

#include "cbs/constants.hpp"
#include "cbs/rng.hpp"

namespace cbs {

/// One leaf-path realization: d = time-height (sum of exponential holds),
/// l = edge-height (number of splits along the path).
struct LeafPathSample {
    double d = 0.0;
    std::int64_t l = 0;
};

/// Two-leaf joint realization (time-heights of two distinct uniform leaves).
struct PairSample {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Occupancy-chain realization: s_steps = splits of the block holding all t
/// samples until they first separate (separating split included); s_star =
/// number of blocks, root included, that ever hold >= 2 samples.
struct OccupancySample {
    std::int64_t s_steps = 0;
    std::int64_t s_star = 0;
};

/// One realized tree, nodes in a contiguous arena. Node 0 is the root;
/// leaves have child indices -1. For leaves split_time equals birth_time.
struct TreeArena {
    struct Node {
        std::int64_t size;        ///< leaves under this node
        std::int32_t depth;       ///< root depth 0
        std::int32_t parent;      ///< -1 for root
        std::int32_t left, right; ///< -1 for leaves
        double birth_time;        ///< = parent's split_time
        double split_time;        ///< birth_time + Exp(h_{size-1}) hold
    };
    std::int64_t n = 0;
    std::vector<Node> nodes;  ///< 2n-1 entries
};

/// Index j in [1, m-1] with P(j) = 1/(j h_{m-1}): inverse CDF by binary
/// search for the smallest j with h_j >= U h_{m-1}.
std::int64_t sample_harmonic_index(const HarmonicTable& table, std::int64_t m, RngStream& rng);

/// Left block size i ~ q(m, i): harmonic index plus a fair coin, valid since
/// q(m,i) = (1/(2 h_{m-1})) (1/i + 1/(m-i)).
std::int64_t sample_split(const HarmonicTable& table, std::int64_t m, RngStream& rng);

/// Size-biased leaf-path chain from n: repeatedly add an Exp(h_{m-1}) hold
/// and jump m -> m - j with j a harmonic index (P(next = k) = 1/(h_{m-1}(m-k))).
LeafPathSample sample_leaf_path(const HarmonicTable& table, std::int64_t n, RngStream& rng);

/// Joint time-heights of two distinct uniform leaves: shared holds while the
/// pair shares a block; hypergeometric allocation at each split; independent
/// leaf paths after separation.
PairSample sample_pair(const HarmonicTable& table, std::int64_t n, RngStream& rng);

/// Occupancy chain for t sampled leaves among n; exact sequential-urn
/// hypergeometric allocation at every split. Requires 2 <= t <= n.
OccupancySample sample_occupancy(const HarmonicTable& table, std::int64_t n, std::int64_t t,
                                 RngStream& rng);

/// Full tree realization via an explicit work stack (no recursion).
TreeArena build_tree(const HarmonicTable& table, std::int64_t n, RngStream& rng);

/// Maxima over leaves of time-height and edge-height.
struct TreeHeights {
    double max_d = 0.0;
    std::int64_t max_l = 0;
};
TreeHeights tree_heights(const TreeArena& arena);

/// counts[t] = number of nodes whose subtree has exactly t leaves, t = 1..n.
std::vector<std::int64_t> subtree_census(const TreeArena& arena);

/// Structural identity check: node count 2n-1, child sizes sum to parent,
/// child depth = parent depth + 1, birth/split time ordering, and the
/// per-realization identity sum_v size(v) = sum_leaves (depth + 1).
/// Returns the number of violations (0 for a well-formed arena).
std::int64_t arena_violations(const TreeArena& arena);

}  // namespace cbs
