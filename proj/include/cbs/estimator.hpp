#pragma once
// Monte Carlo driver: streaming moment accumulation (through 4th order),
// tail counters, worker-pool execution that is bit-reproducible for any
// worker count, CLT standardization, and binomial confidence intervals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbs/constants.hpp"
#include "cbs/progress.hpp"
#include "cbs/series.hpp"

namespace cbs {

/// Streaming central-moment accumulator (count, mean, M2..M4, min/max) with
/// an exact pairwise merge; tail counters per configured threshold.
class Estimate {
public:
    Estimate() = default;
    explicit Estimate(std::vector<double> thresholds);

    void add(double x);
    void merge(const Estimate& other);

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Unbiased (n-1) variance.
    double variance() const;
    double std_err_mean() const;
    double skewness() const;
    double excess_kurtosis() const;
    double min() const { return min_; }
    double max() const { return max_; }

    const std::vector<double>& thresholds() const { return thresholds_; }
    /// Count of samples with x >= thresholds()[i].
    const std::vector<std::int64_t>& tail_counts() const { return tail_counts_; }

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
    double min_ = 0.0, max_ = 0.0;
    std::vector<double> thresholds_;
    std::vector<std::int64_t> tail_counts_;
};

enum class Statistic {
    leaf_D,
    leaf_L,
    pair_product,
    tree_maxD,
    tree_maxL,
    occupancy_S,
    occupancy_Sstar,
    subtree_moment,  ///< X_n(t)/n for one tree
};

const char* statistic_name(Statistic s);
std::optional<Statistic> statistic_from_name(const std::string& name);

struct McConfig {
    Statistic stat = Statistic::leaf_D;
    std::int64_t n = 2;
    std::int64_t t = 2;  ///< occupancy_S/Sstar and subtree_moment only
    std::int64_t samples = 1000;
    std::uint64_t seed = 20260823;  ///< fixed arbitrary default; never wall clock
    int workers = 1;
    std::vector<double> thresholds;
    ProgressFn progress;  ///< optional; called with (samples done, total)
};

/// Runs the configured statistic. Sample i always draws from RNG stream i,
/// and samples are accumulated in fixed 4096-sample blocks merged pairwise,
/// so the result is identical for every worker count.
Estimate run_mc(const HarmonicTable& table, const McConfig& cfg);

/// One pass over full trees collecting everything the tree criteria need:
/// both height maxima, subtree-census means for selected t, and structural
/// identity violations.
struct TreeBatch {
    Estimate max_d, max_l;
    std::vector<std::int64_t> census_t;  ///< the t values requested
    std::vector<Estimate> census;        ///< X(t)/n estimates, same order
    std::int64_t violations = 0;
};
TreeBatch run_tree_batch(const HarmonicTable& table, std::int64_t n, std::int64_t samples,
                         std::uint64_t seed, int workers, std::vector<std::int64_t> census_t,
                         std::vector<double> thresholds_d, std::vector<double> thresholds_l,
                         const ProgressFn& progress = {});

/// Centering/scaling for the distributional normalization of D and L.
/// Leading orders:
///   D: center log(n)/zeta2,           scale^2 (2 zeta3/zeta2^3) log n
///   L: center log^2(n)/(2 zeta2),     scale^2 (2 zeta3/(3 zeta2^3)) log^3 n
/// The finite-size corrected forms add the fitted intercept/secondary terms
/// (constants.hpp defaults, or re-fitted via fit_corrections in fit.hpp);
/// the bare leading order leaves O(1/log n) residuals far too large at
/// reachable n (the D variance ratio would still be 1.125 at n = 1e6).
struct CltParams {
    double c0 = kC0Reference;
    double var_d_intercept = kVarDIntercept;
    double mean_l_intercept = kMeanLIntercept;
    double var_l_resid[3] = {kVarLResidual[0], kVarLResidual[1], kVarLResidual[2]};
    bool corrected = true;

    static CltParams bare();
    double center_d(double n) const;
    double scale_d(double n) const;
    double center_l(double n) const;
    double scale_l(double n) const;
};

/// Standardized-moment table row for clt_report.
struct CltRow {
    std::int64_t n = 0;
    std::int64_t samples = 0;
    double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
    /// Laplace-side diagnostic log(phi_n(u)) * zeta2/(u log n) at
    /// u = 1/sqrt(log n), exact-engine evaluated when n <= 1e5; NaN otherwise.
    double laplace_diag = 0.0;
};
std::vector<CltRow> clt_report(const HarmonicTable& table, Statistic stat,
                               const std::vector<std::int64_t>& ns, std::int64_t samples,
                               std::uint64_t seed, int workers, const CltParams& params);

/// Exact (Clopper-Pearson) binomial confidence interval.
struct BinomialCi {
    double lo = 0.0;
    double hi = 1.0;
};
BinomialCi binomial_ci(std::int64_t successes, std::int64_t trials, double confidence);

/// Tail exceedance report over full trees at one n.
struct TailEntry {
    double threshold = 0.0;
    std::int64_t count = 0;
    double freq = 0.0;
    BinomialCi ci95;
};
struct TailReport {
    std::int64_t n = 0, samples = 0;
    Estimate max_d, max_l;
    std::vector<TailEntry> tails_d, tails_l;
    double ratio_d = 0.0;  ///< mean(maxD)/log n (reported, never asserted)
    double ratio_l = 0.0;  ///< mean(maxL)/log^2 n
};
TailReport tail_report(const HarmonicTable& table, std::int64_t n, std::int64_t samples,
                       std::uint64_t seed, int workers, std::vector<double> thresholds_d,
                       std::vector<double> thresholds_l, const ProgressFn& progress = {});

}  // namespace cbs
