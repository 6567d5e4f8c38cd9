#pragma once
// Asymptotic predictors and least-squares extraction of fitted constants:
// the E[D] ansatz intercept c0, variance/mean slopes against powers of
// log n, the alpha(t) arbitration, and the finite-size CLT corrections.

#include <cstdint>
#include <string>
#include <vector>

#include "cbs/constants.hpp"
#include "cbs/estimator.hpp"
#include "cbs/series.hpp"

namespace cbs {

/// OLS of e_d[n] - log(n)/zeta2 against (1, 1/n) on a log-spaced grid.
struct AnsatzFit {
    double c0 = 0.0;            ///< intercept
    double c1 = 0.0;            ///< coefficient of 1/n
    double residual_max = 0.0;  ///< max |fit residual| over the grid
    std::int64_t n_min = 0, n_max = 0;
    std::int64_t points = 0;
};
AnsatzFit fit_ansatz(const std::vector<double>& e_d, std::int64_t n_min, std::int64_t n_max);

/// Transform applied to n before the linear fit.
enum class SlopeTransform { log_n, log2_n, log3_n };

/// OLS of series[n] against a + b * transform(n) on a log-spaced grid.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_rel_residual = 0.0;
    std::int64_t n_min = 0, n_max = 0;
    std::int64_t points = 0;
};
SlopeFit fit_slope(const std::vector<double>& series, SlopeTransform transform,
                   std::int64_t n_min, std::int64_t n_max);

/// Compares the log-n slope of an E[S*_{n,t}] series with both alpha(t)
/// readings and reports the closer one. The verdict string is advisory
/// ("restricted", "inclusive", or "neither" when the relative distance of
/// the closer variant exceeds 20%).
struct AlphaResolution {
    std::int64_t t = 0;
    double slope = 0.0;
    double alpha_inclusive = 0.0;   ///< +inf when the denominator vanishes
    double alpha_restricted = 0.0;
    double rel_dist_inclusive = 0.0;
    double rel_dist_restricted = 0.0;
    std::string verdict;
};
AlphaResolution resolve_alpha_t(const std::vector<double>& e_sstar, std::int64_t t,
                                std::int64_t n_min, std::int64_t n_max);

/// Statistics with closed-form leading-order predictors.
enum class PredictStatistic {
    mean_d,
    var_d,
    mean_l,
    var_l,
    mean_s,
    mean_sstar,
    mean_subtree_size
};

/// Leading-order (plus known second-order) predictor at n; `t` only matters
/// for mean_s / mean_sstar. mean_sstar uses the restricted alpha variant.
double predict(PredictStatistic stat, double n, std::int64_t t = 2);

/// Re-derives the finite-size CLT standardization constants from exact
/// series (fixed leading coefficients, fitted intercept/low-order terms) on
/// a log-spaced window. Falls back to the window [n_max/10, n_max].
CltParams fit_corrections(const MomentSeries& series, std::int64_t n_min, std::int64_t n_max);

/// A log-spaced integer grid with ~count distinct points in [n_min, n_max].
std::vector<std::int64_t> log_grid(std::int64_t n_min, std::int64_t n_max, int count = 64);

}  // namespace cbs
