#include "cbs/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbs {

std::int64_t sample_harmonic_index(const HarmonicTable& table, std::int64_t m, RngStream& rng) {
    if (m < 2) throw std::domain_error("sample_harmonic_index: m must be >= 2");
    if (m - 1 > table.n_max())
        throw std::domain_error("sample_harmonic_index: m exceeds harmonic table");
    if (m == 2) return 1;
    // Smallest j with h_j >= u, u uniform on (0, h_{m-1}]; j = 1 when u <= h_1.
    const double u = rng.uniform01() * table.h(m - 1);
    std::int64_t lo = 1, hi = m - 1;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (table.h(mid) >= u)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::int64_t sample_split(const HarmonicTable& table, std::int64_t m, RngStream& rng) {
    const std::int64_t j = sample_harmonic_index(table, m, rng);
    return rng.coin() ? j : m - j;
}

LeafPathSample sample_leaf_path(const HarmonicTable& table, std::int64_t n, RngStream& rng) {
    if (n < 1) throw std::domain_error("sample_leaf_path: n must be >= 1");
    LeafPathSample out;
    std::int64_t m = n;
    while (m >= 2) {
        out.d += rng.exponential(table.h(m - 1));
        out.l += 1;
        m -= sample_harmonic_index(table, m, rng);
    }
    return out;
}

PairSample sample_pair(const HarmonicTable& table, std::int64_t n, RngStream& rng) {
    if (n < 2) throw std::domain_error("sample_pair: n must be >= 2");
    PairSample out;
    std::int64_t m = n;
    // Shared phase: both tagged leaves in the same block of size m >= 2.
    for (;;) {
        const double hold = rng.exponential(table.h(m - 1));
        out.d1 += hold;
        out.d2 += hold;
        const std::int64_t i = sample_split(table, m, rng);
        // Allocate the two tagged leaves among the i left slots: given the
        // split, leaf placements are exchangeable, so
        //   P(both left) = i(i-1)/(m(m-1)), P(both right) = (m-i)(m-i-1)/(m(m-1)).
        const double denom = static_cast<double>(m) * static_cast<double>(m - 1);
        const double p_left = static_cast<double>(i) * static_cast<double>(i - 1) / denom;
        const double p_right =
            static_cast<double>(m - i) * static_cast<double>(m - i - 1) / denom;
        const double u = rng.uniform_halfopen();
        if (u < p_left) {
            m = i;
        } else if (u < p_left + p_right) {
            m = m - i;
        } else {
            // Separated: by exchangeability assign leaf 1 to the left block.
            const LeafPathSample tail1 = sample_leaf_path(table, i, rng);
            const LeafPathSample tail2 = sample_leaf_path(table, m - i, rng);
            out.d1 += tail1.d;
            out.d2 += tail2.d;
            return out;
        }
        if (m == 1) return out;  // unreachable: a 1-block cannot hold the pair
    }
}

namespace {
/// Number of the s tagged leaves sent to the left block of size i, by
/// sequential urn: draw the s tags one by one without replacement from a
/// population of m slots of which i are left-slots.
std::int64_t hypergeometric_urn(std::int64_t m, std::int64_t i, std::int64_t s,
                                RngStream& rng) {
    std::int64_t left = 0;
    std::int64_t remaining_pop = m, remaining_left = i;
    for (std::int64_t k = 0; k < s; ++k) {
        const double p = static_cast<double>(remaining_left) / static_cast<double>(remaining_pop);
        if (rng.uniform_halfopen() < p) {
            ++left;
            --remaining_left;
        }
        --remaining_pop;
    }
    return left;
}
}  // namespace

OccupancySample sample_occupancy(const HarmonicTable& table, std::int64_t n, std::int64_t t,
                                 RngStream& rng) {
    if (t < 2 || t > n) throw std::domain_error("sample_occupancy: need 2 <= t <= n");
    OccupancySample out;
    // Phase 1: the block holding all t samples; each split counts toward S,
    // and each such block counts toward S*.
    std::int64_t m = n, s = t;
    std::int64_t after_m1 = 0, after_s1 = 0, after_m2 = 0, after_s2 = 0;
    for (;;) {
        out.s_steps += 1;
        out.s_star += 1;
        const std::int64_t i = sample_split(table, m, rng);
        const std::int64_t j = hypergeometric_urn(m, i, s, rng);
        if (j == s) {
            m = i;  // all samples went left
        } else if (j == 0) {
            m = m - i;
        } else {
            after_m1 = i;
            after_s1 = j;
            after_m2 = m - i;
            after_s2 = s - j;
            break;
        }
    }
    // Phase 2: independent branching of the separated sample groups; only
    // blocks with >= 2 samples contribute to S* (and keep splitting).
    std::vector<std::pair<std::int64_t, std::int64_t>> frontier;
    if (after_s1 >= 2) frontier.emplace_back(after_m1, after_s1);
    if (after_s2 >= 2) frontier.emplace_back(after_m2, after_s2);
    while (!frontier.empty()) {
        auto [bm, bs] = frontier.back();
        frontier.pop_back();
        out.s_star += 1;
        const std::int64_t i = sample_split(table, bm, rng);
        const std::int64_t j = hypergeometric_urn(bm, i, bs, rng);
        if (j >= 2) frontier.emplace_back(i, j);
        if (bs - j >= 2) frontier.emplace_back(bm - i, bs - j);
    }
    return out;
}

TreeArena build_tree(const HarmonicTable& table, std::int64_t n, RngStream& rng) {
    if (n < 2) throw std::domain_error("build_tree: n must be >= 2");
    if (n - 1 > table.n_max()) throw std::domain_error("build_tree: n exceeds harmonic table");
    TreeArena arena;
    arena.n = n;
    arena.nodes.reserve(static_cast<std::size_t>(2 * n - 1));
    arena.nodes.push_back({n, 0, -1, -1, -1, 0.0, 0.0});
    // Work stack of node indices whose subtree is not yet expanded.
    std::vector<std::int32_t> stack;
    stack.push_back(0);
    while (!stack.empty()) {
        const std::int32_t idx = stack.back();
        stack.pop_back();
        const std::int64_t m = arena.nodes[static_cast<std::size_t>(idx)].size;
        if (m == 1) continue;
        const double hold = rng.exponential(table.h(m - 1));
        const std::int64_t i = sample_split(table, m, rng);
        auto& node = arena.nodes[static_cast<std::size_t>(idx)];
        node.split_time = node.birth_time + hold;
        const auto left = static_cast<std::int32_t>(arena.nodes.size());
        const auto right = left + 1;
        node.left = left;
        node.right = right;
        const std::int32_t depth = node.depth + 1;
        const double birth = node.split_time;
        arena.nodes.push_back({i, depth, idx, -1, -1, birth, birth});
        arena.nodes.push_back({m - i, depth, idx, -1, -1, birth, birth});
        if (i >= 2) stack.push_back(left);
        if (m - i >= 2) stack.push_back(right);
    }
    return arena;
}

TreeHeights tree_heights(const TreeArena& arena) {
    TreeHeights out;
    for (const auto& node : arena.nodes) {
        if (node.size != 1) continue;
        out.max_d = std::max(out.max_d, node.birth_time);
        out.max_l = std::max<std::int64_t>(out.max_l, node.depth);
    }
    return out;
}

std::vector<std::int64_t> subtree_census(const TreeArena& arena) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(arena.n) + 1, 0);
    for (const auto& node : arena.nodes) counts[static_cast<std::size_t>(node.size)] += 1;
    return counts;
}

std::int64_t arena_violations(const TreeArena& arena) {
    std::int64_t bad = 0;
    if (static_cast<std::int64_t>(arena.nodes.size()) != 2 * arena.n - 1) ++bad;
    std::int64_t size_sum = 0, leaf_depth_sum = 0, leaves = 0;
    for (std::size_t idx = 0; idx < arena.nodes.size(); ++idx) {
        const auto& node = arena.nodes[idx];
        size_sum += node.size;
        if (node.size == 1) {
            ++leaves;
            leaf_depth_sum += node.depth + 1;
            if (node.left != -1 || node.right != -1) ++bad;
            continue;
        }
        if (node.left < 0 || node.right < 0) {
            ++bad;
            continue;
        }
        const auto& l = arena.nodes[static_cast<std::size_t>(node.left)];
        const auto& r = arena.nodes[static_cast<std::size_t>(node.right)];
        if (l.size + r.size != node.size) ++bad;
        if (l.depth != node.depth + 1 || r.depth != node.depth + 1) ++bad;
        if (l.parent != static_cast<std::int32_t>(idx) ||
            r.parent != static_cast<std::int32_t>(idx))
            ++bad;
        if (l.birth_time != node.split_time || r.birth_time != node.split_time) ++bad;
        if (node.split_time < node.birth_time) ++bad;
    }
    if (leaves != arena.n) ++bad;
    if (size_sum != leaf_depth_sum) ++bad;
    return bad;
}

}  // namespace cbs
