#include "cbs/oracle.hpp"

#include <deque>
#include <stdexcept>

#include "cbs/constants.hpp"

namespace cbs {

namespace {

struct Shape {
    std::int64_t size = 1;
    const Shape* left = nullptr;
    const Shape* right = nullptr;
};

/// Owns every distinct shape; enumeration lists (shape, probability) pairs
/// per size with subtrees shared (shapes are read-only once built).
struct ShapePool {
    std::deque<Shape> storage;
    std::vector<std::vector<std::pair<const Shape*, double>>> by_size;  // [m]
    const HarmonicTable table{16};

    explicit ShapePool(std::int64_t n_max) : by_size(static_cast<std::size_t>(n_max) + 1) {
        storage.push_back(Shape{});  // the single leaf
        by_size[1] = {{&storage.front(), 1.0}};
        for (std::int64_t m = 2; m <= n_max; ++m) {
            SplitLaw law(table, m);
            auto& list = by_size[static_cast<std::size_t>(m)];
            for (std::int64_t i = 1; i < m; ++i) {
                const double qi = law.q(i);
                for (const auto& [ls, lp] : by_size[static_cast<std::size_t>(i)])
                    for (const auto& [rs, rp] : by_size[static_cast<std::size_t>(m - i)]) {
                        storage.push_back(Shape{m, ls, rs});
                        list.emplace_back(&storage.back(), qi * lp * rp);
                    }
            }
        }
    }
};

double binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (std::int64_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

struct NodeInfo {
    std::int64_t size, left_size, depth;
};

void collect(const Shape* s, std::int64_t depth, std::vector<NodeInfo>& nodes,
             double& depth_sum, double& depth_sq_sum) {
    nodes.push_back({s->size, s->left ? s->left->size : 0, depth});
    if (!s->left) {
        const double d = static_cast<double>(depth);
        depth_sum += d;
        depth_sq_sum += d * d;
        return;
    }
    collect(s->left, depth + 1, nodes, depth_sum, depth_sq_sum);
    collect(s->right, depth + 1, nodes, depth_sum, depth_sq_sum);
}

}  // namespace

OracleStats enumerate_oracle(std::int64_t n) {
    if (n < 1 || n > 9) throw std::domain_error("enumerate_oracle: 1 <= n <= 9");
    ShapePool pool(n);
    OracleStats out;
    out.n = n;
    out.xi.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.e_s.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.e_sstar.assign(static_cast<std::size_t>(n) + 1, 0.0);
    const double dn = static_cast<double>(n);
    double e_l2 = 0.0;
    std::vector<NodeInfo> nodes;
    for (const auto& [shape, prob] : pool.by_size[static_cast<std::size_t>(n)]) {
        nodes.clear();
        double depth_sum = 0.0, depth_sq_sum = 0.0;
        collect(shape, 0, nodes, depth_sum, depth_sq_sum);
        out.e_l += prob * depth_sum / dn;
        e_l2 += prob * depth_sq_sum / dn;
        for (const auto& v : nodes)
            out.xi[static_cast<std::size_t>(v.size)] += prob / dn;
        for (std::int64_t t = 2; t <= n; ++t) {
            const double total = binom(n, t);
            double s_acc = 0.0, sstar_acc = 0.0;
            for (const auto& v : nodes) {
                const std::int64_t a = v.size;
                if (a < 2) continue;
                // P(a uniform t-subset has >= 2 members below this node).
                sstar_acc += 1.0 - (binom(n - a, t) +
                                    static_cast<double>(a) * binom(n - a, t - 1)) /
                                       total;
                // P(all t below this node but not all below one child):
                // this node is then the separating split, at depth+1 steps.
                const double p_lca =
                    (binom(a, t) - binom(v.left_size, t) - binom(a - v.left_size, t)) / total;
                s_acc += static_cast<double>(v.depth + 1) * p_lca;
            }
            out.e_s[static_cast<std::size_t>(t)] += prob * s_acc;
            out.e_sstar[static_cast<std::size_t>(t)] += prob * sstar_acc;
        }
    }
    out.v_l = e_l2 - out.e_l * out.e_l;
    return out;
}

}  // namespace cbs
