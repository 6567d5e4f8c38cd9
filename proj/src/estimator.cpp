#include "cbs/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "cbs/reduction.hpp"
#include "cbs/rng.hpp"
#include "cbs/sampler.hpp"

namespace cbs {

Estimate::Estimate(std::vector<double> thresholds)
    : thresholds_(std::move(thresholds)), tail_counts_(thresholds_.size(), 0) {}

void Estimate::add(double x) {
    // One-pass central-moment update through 4th order.
    const double n1 = static_cast<double>(n_);
    n_ += 1;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
           4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
    if (n_ == 1) {
        min_ = max_ = x;
    } else {
        if (x < min_) min_ = x;
        if (x > max_) max_ = x;
    }
    for (std::size_t i = 0; i < thresholds_.size(); ++i)
        if (x >= thresholds_[i]) tail_counts_[i] += 1;
}

void Estimate::merge(const Estimate& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
    const double nt = na + nb;
    const double delta = other.mean_ - mean_;
    const double delta2 = delta * delta;
    const double m2 = m2_ + other.m2_ + delta2 * na * nb / nt;
    const double m3 = m3_ + other.m3_ + delta2 * delta * na * nb * (na - nb) / (nt * nt) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / nt;
    const double m4 = m4_ + other.m4_ +
                      delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) / (nt * nt * nt) +
                      6.0 * delta2 * (na * na * other.m2_ + nb * nb * m2_) / (nt * nt) +
                      4.0 * delta * (na * other.m3_ - nb * m3_) / nt;
    mean_ += delta * nb / nt;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += other.n_;
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
    for (std::size_t i = 0; i < tail_counts_.size(); ++i)
        tail_counts_[i] += other.tail_counts_[i];
}

double Estimate::variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double Estimate::std_err_mean() const {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double Estimate::skewness() const {
    if (n_ < 2 || m2_ <= 0.0) return 0.0;
    const double n = static_cast<double>(n_);
    return std::sqrt(n) * m3_ / std::pow(m2_, 1.5);
}

double Estimate::excess_kurtosis() const {
    if (n_ < 2 || m2_ <= 0.0) return 0.0;
    const double n = static_cast<double>(n_);
    return n * m4_ / (m2_ * m2_) - 3.0;
}

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::leaf_D: return "leaf_D";
        case Statistic::leaf_L: return "leaf_L";
        case Statistic::pair_product: return "pair_product";
        case Statistic::tree_maxD: return "tree_maxD";
        case Statistic::tree_maxL: return "tree_maxL";
        case Statistic::occupancy_S: return "occupancy_S";
        case Statistic::occupancy_Sstar: return "occupancy_Sstar";
        case Statistic::subtree_moment: return "subtree_moment";
    }
    return "?";
}

std::optional<Statistic> statistic_from_name(const std::string& name) {
    for (Statistic s : {Statistic::leaf_D, Statistic::leaf_L, Statistic::pair_product,
                        Statistic::tree_maxD, Statistic::tree_maxL, Statistic::occupancy_S,
                        Statistic::occupancy_Sstar, Statistic::subtree_moment})
        if (name == statistic_name(s)) return s;
    return std::nullopt;
}

namespace {

/// Runs `sample(stream_index) -> double` for indices [0, samples) on the
/// worker pool. Samples accumulate into fixed 4096-index blocks; block
/// partials merge by a pairwise tree in block order. The schedule (which
/// worker runs which block) never affects the result.
template <typename SampleFn>
Estimate pooled_run(std::int64_t samples, int workers, const std::vector<double>& thresholds,
                    const ProgressFn& progress, SampleFn&& sample) {
    if (samples < 1) throw std::domain_error("run_mc: samples must be >= 1");
    const auto block_count =
        static_cast<std::size_t>((samples + static_cast<std::int64_t>(kReductionBlock) - 1) /
                                 static_cast<std::int64_t>(kReductionBlock));
    std::vector<Estimate> partial(block_count, Estimate(thresholds));
    std::atomic<std::size_t> next_block{0};
    std::atomic<std::int64_t> done_samples{0};
    auto worker_loop = [&]() {
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= block_count) return;
            const std::int64_t start = static_cast<std::int64_t>(b * kReductionBlock);
            const std::int64_t stop =
                std::min<std::int64_t>(samples, start + static_cast<std::int64_t>(kReductionBlock));
            Estimate acc(thresholds);
            for (std::int64_t i = start; i < stop; ++i) acc.add(sample(i));
            partial[b] = std::move(acc);
            if (progress) progress(done_samples.fetch_add(stop - start) + (stop - start), samples);
        }
    };
    const int pool = std::max(1, workers);
    if (pool == 1 || block_count == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(pool));
        for (int w = 0; w < pool; ++w) threads.emplace_back(worker_loop);
        for (auto& th : threads) th.join();
    }
    // Pairwise tree over block partials, fixed order.
    while (partial.size() > 1) {
        const std::size_t half = (partial.size() + 1) / 2;
        for (std::size_t j = 0; j + half < partial.size(); ++j)
            partial[j].merge(partial[j + half]);
        partial.resize(half);
    }
    return std::move(partial[0]);
}

}  // namespace

Estimate run_mc(const HarmonicTable& table, const McConfig& cfg) {
    const std::int64_t n = cfg.n, t = cfg.t;
    const std::uint64_t seed = cfg.seed;
    switch (cfg.stat) {
        case Statistic::leaf_D:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return sample_leaf_path(table, n, rng).d;
            });
        case Statistic::leaf_L:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return static_cast<double>(sample_leaf_path(table, n, rng).l);
            });
        case Statistic::pair_product:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                const PairSample p = sample_pair(table, n, rng);
                return p.d1 * p.d2;
            });
        case Statistic::tree_maxD:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return tree_heights(build_tree(table, n, rng)).max_d;
            });
        case Statistic::tree_maxL:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return static_cast<double>(tree_heights(build_tree(table, n, rng)).max_l);
            });
        case Statistic::occupancy_S:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return static_cast<double>(sample_occupancy(table, n, t, rng).s_steps);
            });
        case Statistic::occupancy_Sstar:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                return static_cast<double>(sample_occupancy(table, n, t, rng).s_star);
            });
        case Statistic::subtree_moment:
            return pooled_run(cfg.samples, cfg.workers, cfg.thresholds, cfg.progress, [&](std::int64_t i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                const TreeArena arena = build_tree(table, n, rng);
                const auto counts = subtree_census(arena);
                return static_cast<double>(counts[static_cast<std::size_t>(t)]) /
                       static_cast<double>(n);
            });
    }
    throw std::invalid_argument("run_mc: unknown statistic");
}

TreeBatch run_tree_batch(const HarmonicTable& table, std::int64_t n, std::int64_t samples,
                         std::uint64_t seed, int workers, std::vector<std::int64_t> census_t,
                         std::vector<double> thresholds_d, std::vector<double> thresholds_l,
                         const ProgressFn& progress) {
    // A single tree per sample index feeds all collectors. To keep the
    // deterministic block-merge contract each collector runs its own pooled
    // pass... which would rebuild trees. Instead: one pass, a wide sample
    // tuple per index, manual block accumulation mirroring pooled_run.
    if (samples < 1) throw std::domain_error("run_tree_batch: samples must be >= 1");
    struct BlockAcc {
        Estimate max_d, max_l;
        std::vector<Estimate> census;
        std::int64_t violations = 0;
    };
    const auto block_count =
        static_cast<std::size_t>((samples + static_cast<std::int64_t>(kReductionBlock) - 1) /
                                 static_cast<std::int64_t>(kReductionBlock));
    std::vector<BlockAcc> partial(block_count);
    std::atomic<std::size_t> next_block{0};
    std::atomic<std::int64_t> done_samples{0};
    auto worker_loop = [&]() {
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= block_count) return;
            BlockAcc acc;
            acc.max_d = Estimate(thresholds_d);
            acc.max_l = Estimate(thresholds_l);
            acc.census.assign(census_t.size(), Estimate{});
            const std::int64_t start = static_cast<std::int64_t>(b * kReductionBlock);
            const std::int64_t stop =
                std::min<std::int64_t>(samples, start + static_cast<std::int64_t>(kReductionBlock));
            for (std::int64_t i = start; i < stop; ++i) {
                RngStream rng(seed, static_cast<std::uint64_t>(i));
                const TreeArena arena = build_tree(table, n, rng);
                acc.violations += arena_violations(arena);
                const TreeHeights h = tree_heights(arena);
                acc.max_d.add(h.max_d);
                acc.max_l.add(static_cast<double>(h.max_l));
                if (!census_t.empty()) {
                    const auto counts = subtree_census(arena);
                    for (std::size_t ci = 0; ci < census_t.size(); ++ci)
                        acc.census[ci].add(
                            static_cast<double>(counts[static_cast<std::size_t>(census_t[ci])]) /
                            static_cast<double>(n));
                }
            }
            partial[b] = std::move(acc);
            if (progress) progress(done_samples.fetch_add(stop - start) + (stop - start), samples);
        }
    };
    const int pool = std::max(1, workers);
    if (pool == 1 || block_count == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < pool; ++w) threads.emplace_back(worker_loop);
        for (auto& th : threads) th.join();
    }
    while (partial.size() > 1) {
        const std::size_t half = (partial.size() + 1) / 2;
        for (std::size_t j = 0; j + half < partial.size(); ++j) {
            partial[j].max_d.merge(partial[j + half].max_d);
            partial[j].max_l.merge(partial[j + half].max_l);
            for (std::size_t ci = 0; ci < partial[j].census.size(); ++ci)
                partial[j].census[ci].merge(partial[j + half].census[ci]);
            partial[j].violations += partial[j + half].violations;
        }
        partial.resize(half);
    }
    TreeBatch out;
    out.max_d = std::move(partial[0].max_d);
    out.max_l = std::move(partial[0].max_l);
    out.census_t = std::move(census_t);
    out.census = std::move(partial[0].census);
    out.violations = partial[0].violations;
    return out;
}

CltParams CltParams::bare() {
    CltParams p;
    p.corrected = false;
    return p;
}

double CltParams::center_d(double n) const {
    const ZetaConstants z = zeta_constants();
    const double ln = std::log(n);
    return ln / z.zeta2 + (corrected ? c0 : 0.0);
}

double CltParams::scale_d(double n) const {
    const ZetaConstants z = zeta_constants();
    const double ln = std::log(n);
    double v = 2.0 * z.zeta3 / (z.zeta2 * z.zeta2 * z.zeta2) * ln;
    if (corrected) v += var_d_intercept;
    return std::sqrt(v);
}

double CltParams::center_l(double n) const {
    const ZetaConstants z = zeta_constants();
    const double ln = std::log(n);
    double c = ln * ln / (2.0 * z.zeta2);
    if (corrected) {
        const double sec = (z.euler_gamma * z.zeta2 + z.zeta3) / (z.zeta2 * z.zeta2);
        c += sec * ln + mean_l_intercept;
    }
    return c;
}

double CltParams::scale_l(double n) const {
    const ZetaConstants z = zeta_constants();
    const double ln = std::log(n);
    double v = 2.0 * z.zeta3 / (3.0 * z.zeta2 * z.zeta2 * z.zeta2) * ln * ln * ln;
    if (corrected) v += var_l_resid[0] + var_l_resid[1] * ln + var_l_resid[2] * ln * ln;
    return std::sqrt(v);
}

std::vector<CltRow> clt_report(const HarmonicTable& table, Statistic stat,
                               const std::vector<std::int64_t>& ns, std::int64_t samples,
                               std::uint64_t seed, int workers, const CltParams& params) {
    if (stat != Statistic::leaf_D && stat != Statistic::leaf_L)
        throw std::invalid_argument("clt_report: statistic must be leaf_D or leaf_L");
    const ZetaConstants z = zeta_constants();
    std::vector<CltRow> rows;
    for (std::int64_t n : ns) {
        if (n < 10) throw std::domain_error("clt_report: n must be >= 10");
        McConfig cfg;
        cfg.stat = stat;
        cfg.n = n;
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.workers = workers;
        const Estimate est = run_mc(table, cfg);
        const double dn = static_cast<double>(n);
        const double center =
            (stat == Statistic::leaf_D) ? params.center_d(dn) : params.center_l(dn);
        const double scale =
            (stat == Statistic::leaf_D) ? params.scale_d(dn) : params.scale_l(dn);
        CltRow row;
        row.n = n;
        row.samples = est.count();
        row.mean = (est.mean() - center) / scale;
        row.variance = est.variance() / (scale * scale);
        // Standardization is affine, so shape moments transfer directly.
        row.skewness = est.skewness();
        row.excess_kurtosis = est.excess_kurtosis();
        row.laplace_diag = std::numeric_limits<double>::quiet_NaN();
        if (stat == Statistic::leaf_D && n <= 100000) {
            const double u = 1.0 / std::sqrt(std::log(dn));
            const LaplaceSeries phi = laplace_d(table, n, u);
            row.laplace_diag = std::log(phi.value[static_cast<std::size_t>(n)]) * z.zeta2 /
                               (u * std::log(dn));
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {
/// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double dm = static_cast<double>(m);
        double aa = dm * (b - dm) * x / ((qam + 2.0 * dm) * (a + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + 2.0 * dm) * (qap + 2.0 * dm));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return h;
}

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

/// Inverse of I_x(a,b) in x by bisection (60 iterations: ~1 ulp of [0,1]).
double inc_beta_inv(double a, double b, double p) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inc_beta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

BinomialCi binomial_ci(std::int64_t successes, std::int64_t trials, double confidence) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw std::domain_error("binomial_ci: bad counts");
    const double alpha = 1.0 - confidence;
    const double k = static_cast<double>(successes), n = static_cast<double>(trials);
    BinomialCi ci;
    ci.lo = (successes == 0) ? 0.0 : inc_beta_inv(k, n - k + 1.0, alpha / 2.0);
    ci.hi = (successes == trials) ? 1.0 : inc_beta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return ci;
}

TailReport tail_report(const HarmonicTable& table, std::int64_t n, std::int64_t samples,
                       std::uint64_t seed, int workers, std::vector<double> thresholds_d,
                       std::vector<double> thresholds_l, const ProgressFn& progress) {
    if (n < 10) throw std::domain_error("tail_report: n must be >= 10");
    TreeBatch batch = run_tree_batch(table, n, samples, seed, workers, {},
                                     thresholds_d, thresholds_l, progress);
    TailReport out;
    out.n = n;
    out.samples = samples;
    const double ln = std::log(static_cast<double>(n));
    out.ratio_d = batch.max_d.mean() / ln;
    out.ratio_l = batch.max_l.mean() / (ln * ln);
    auto fill = [samples](const Estimate& est, std::vector<TailEntry>& entries) {
        for (std::size_t i = 0; i < est.thresholds().size(); ++i) {
            TailEntry e;
            e.threshold = est.thresholds()[i];
            e.count = est.tail_counts()[i];
            e.freq = static_cast<double>(e.count) / static_cast<double>(samples);
            e.ci95 = binomial_ci(e.count, samples, 0.95);
            entries.push_back(e);
        }
    };
    fill(batch.max_d, out.tails_d);
    fill(batch.max_l, out.tails_l);
    out.max_d = std::move(batch.max_d);
    out.max_l = std::move(batch.max_l);
    return out;
}

}  // namespace cbs
