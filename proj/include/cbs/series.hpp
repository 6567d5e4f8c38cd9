#pragma once
// Exact-recurrence engine: full series over n for every moment, transform,
// pruned-tree and subtree-count statistic of the critical beta-splitting
// tree. All sweeps are O(n^2) with deterministic summation (reduction.hpp);
// results are exact up to floating-point roundoff.

#include <cstdint>
#include <vector>

#include "cbs/constants.hpp"
#include "cbs/progress.hpp"

namespace cbs {

/// Exact moments indexed n = 1..n_max (entry 0 unused, kept for direct
/// indexing). D is the time-height of a uniform random leaf (sum of
/// exponential holds), L its edge-height (number of splits), Z the product
/// of the time-heights of two distinct uniform leaves, r the correlation
/// (E[Z]-E[D]^2)/var(D).
struct MomentSeries {
    std::int64_t n_max = 0;
    std::vector<double> e_d, v_d;  ///< mean/variance of D_n
    std::vector<double> e_l, v_l;  ///< mean/variance of L_n
    std::vector<double> e_z, r;    ///< E[Z_n] and correlation r_n (empty until pair_product)
};

/// E[D_n] and var(D_n):
///   E[D_n]  = (1/h_{n-1}) (1 + sum_{k<n} E[D_k]/(n-k))
///   var(D_n) = (1/h_{n-1}) sum_{k<n} (var(D_k) + (E[D_n]-E[D_k])^2)/(n-k)
/// The variance sweep expands the square so each row needs two running sums.
MomentSeries d_moments(const HarmonicTable& table, std::int64_t n_max,
                       const ProgressFn& progress = {});

/// Adds e_l, v_l to a series:
///   E[L_n]  = 1 + (1/h_{n-1}) sum E[L_k]/(n-k)
///   var(L_n) = -1 + (1/h_{n-1}) sum (var(L_k) + (E[L_n]-E[L_k])^2)/(n-k)
void l_moments(const HarmonicTable& table, MomentSeries& series,
               const ProgressFn& progress = {});

/// Adds e_z, r. Requires e_d/v_d already computed; n_max <= 1e5 (a second
/// O(n^2) convolution sum_i E[D_i] E[D_{n-i}] is required per row):
///   E[Z_n] = (1/((n-1)h)) sum_i (i-1)E[Z_i]/(n-i)            [pair stays together]
///          + 2 E[D_n]/h                                       [shared hold terms]
///          + (1/((n-1)h)) sum_i E[D_i] E[D_{n-i}]             [pair separated]
void pair_product(const HarmonicTable& table, MomentSeries& series,
                  const ProgressFn& progress = {});

/// Convenience: e_d-only sweep (used for the deep ansatz run to n = 4e5).
std::vector<double> d_mean_only(const HarmonicTable& table, std::int64_t n_max,
                                const ProgressFn& progress = {});

/// Transforms of D and L at a fixed argument u.
///   phi_n(u) = E[e^{u D_n}] = (1/(h_{n-1}-u)) sum phi_k(u)/(n-k),  u < 1
///   f_n(u)   = E[e^{u L_n}] = (e^u/h_{n-1}) sum f_k(u)/(n-k),      |u| <= 5
struct LaplaceSeries {
    double u = 0.0;
    std::vector<double> value;  ///< index n = 1..n_max
};
LaplaceSeries laplace_d(const HarmonicTable& table, std::int64_t n_max, double u);
LaplaceSeries laplace_l(const HarmonicTable& table, std::int64_t n_max, double u);

/// Which recursion to use for E[S*_{n,t}] (see pruned_length_expectation).
enum class PrunedLengthForm {
    corrected,              ///< multiplies each (t1,t2) term by C(t,t1); matches enumeration
    uncorrected_diagnostic, ///< the bare partition form; kept to document its bias
};

/// Pruned-tree statistics for t sampled leaves among n.
///   S_{n,t}  = number of splits of the block holding all t samples until
///              they first separate (the separating split included);
///   S*_{n,t} = number of blocks, root included, ever holding >= 2 samples
///              (the size of the pruned spanning tree).
/// Internally scaled by falling factorials: Phi_n = (n-1)_{t-1} E[S_{n,t}],
///   Phi_n = (n-1)_{t-1} + (1/h_{n-1}) sum_k Phi_k/(n-k)
/// and Psi_{n,tau} for tau = 2..t jointly,
///   Psi_{n,t} = (n-1)_{t-1}
///             + (1/h_{n-1}) sum_{t1=2}^{t} [C(t,t1)] sum_k (n-k)_{t2}/(n-k) Psi_{k,t1}
/// with t2 = t-t1, Psi_{n,0} = Psi_{n,1} = 0, Psi_{n,tau} = 0 for n < tau.
/// The C(t,t1) factor (sampled-leaf placement) is required to match exact
/// enumeration — E[S*_{3,3}] is 2, not the 4/3 the bare form yields; the bare
/// form is retained as a diagnostic variant. t = 2 is identical either way.
struct PrunedTable {
    std::int64_t t = 0;
    std::vector<double> e_s;      ///< E[S_{n,t}], index n (0 for n < t)
    std::vector<double> e_sstar;  ///< E[S*_{n,t}], index n (0 for n < t)
};
PrunedTable branch_split_expectation(const HarmonicTable& table, std::int64_t n_max,
                                     std::int64_t t, const ProgressFn& progress = {});
PrunedTable pruned_length_expectation(const HarmonicTable& table, std::int64_t n_max,
                                      std::int64_t t,
                                      PrunedLengthForm form = PrunedLengthForm::corrected);
/// Both statistics in one table. Caps: 2 <= t <= 8, n_max <= 3e4 (e_sstar);
/// use branch_split_expectation alone for deeper e_s runs (t <= 12, n <= 1e5).
PrunedTable pruned_table(const HarmonicTable& table, std::int64_t n_max, std::int64_t t,
                         PrunedLengthForm form = PrunedLengthForm::corrected);
/// One Psi sweep, all levels: element [tau] (2 <= tau <= t_max) is the full
/// E[S*_{n,tau}] series. Elements [0], [1] are empty.
std::vector<std::vector<double>> pruned_length_levels(
    const HarmonicTable& table, std::int64_t n_max, std::int64_t t_max,
    PrunedLengthForm form = PrunedLengthForm::corrected, const ProgressFn& progress = {});

/// Subtree-count laws. xi[n][t] = E[X_n(t)]/n where X_n(t) counts the
/// subtrees (among the 2n-1 nodes) with exactly t leaves:
///   xi_n(t) = (1/h_{n-1}) sum_{j=t}^{n-1} xi_j(t)/(n-j),  xi_t(t) = 1/t.
/// eta[n][t] = sum_{tau>=t} xi_n(tau), computed by the equivalent direct
/// recursion eta_n(t) = 1/n + (1/h_{n-1}) sum_j eta_j(t)/(n-j) (the 1/n term
/// accounts for the root row; suffix sums over a full triangle agree).
/// u_dist[n][t] = xi[n][t]/(2-1/n) is the normalized node-size distribution.
struct SubtreeTable {
    std::int64_t n_max = 0;
    std::int64_t t_max = 0;
    // Row-major [n][t], n = 0..n_max, t = 0..t_max; entries with t > n are 0.
    std::vector<double> xi, eta, u_dist;
    double at(const std::vector<double>& a, std::int64_t n, std::int64_t t) const {
        return a[static_cast<std::size_t>(n) * static_cast<std::size_t>(t_max + 1) +
                 static_cast<std::size_t>(t)];
    }
    double xi_at(std::int64_t n, std::int64_t t) const { return at(xi, n, t); }
    double eta_at(std::int64_t n, std::int64_t t) const { return at(eta, n, t); }
    double u_at(std::int64_t n, std::int64_t t) const { return at(u_dist, n, t); }
};
SubtreeTable subtree_distribution(const HarmonicTable& table, std::int64_t n_max,
                                  std::int64_t t_max);

/// F_n(q) = sum_t q^t xi_n(t), truncated at the first t where the bound
/// q^t/(t h_t) drops below 1e-16. Returns values for n = 1..n_max.
std::vector<double> subtree_pgf(const HarmonicTable& table, std::int64_t n_max, double q);

/// sum_{k=1}^{n-1} log(k/n)/(n-k) and sum log^2(k/n)/(n-k), pairwise-summed.
double logratio_sum(std::int64_t n);
double logratio_sq_sum(std::int64_t n);

/// Asymptotic remainder for logratio_sum:
///   R(n) = -zeta(2) + log(2 pi e n)/(2n) + log(n)/(12 n^2);
/// the residual (sum - R) scales as n^{-2}.
double logratio_remainder(std::int64_t n);

}  // namespace cbs
