// cbslab: command-line front end for the critical beta-splitting laboratory.
// Subcommands: exact (recurrence tables), simulate (Monte Carlo reports),
// fit (asymptotic-constant extraction), constants, verify (acceptance gate).
//
// Exit codes: 0 success, 1 acceptance failure (or unexpected runtime error),
// 2 usage/domain error, 3 resource exhaustion. All randomness flows from
// --seed (fixed default, never wall clock); worker count comes from
// --workers, falling back to the CBS_WORKERS environment variable.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbs/acceptance.hpp"
#include "cbs/constants.hpp"
#include "cbs/estimator.hpp"
#include "cbs/fit.hpp"
#include "cbs/io.hpp"
#include "cbs/progress.hpp"
#include "cbs/series.hpp"

namespace {

using cbs::HarmonicTable;
using cbs::ProgressMeter;
using std::int64_t;

constexpr std::uint64_t kDefaultSeed = 20260823;

/// Options shared by every subcommand that writes a table or report.
struct OutputOpts {
    std::string output;           ///< empty = stdout
    std::string format = "csv";   ///< csv | json
};

void add_output(CLI::App* cmd, OutputOpts& o, const char* default_format) {
    o.format = default_format;
    cmd->add_option("--output,-o", o.output, "Write to this file instead of stdout");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

/// Writes either to --output or stdout; flushes and reports failure.
void deliver(const OutputOpts& o, const std::string& payload) {
    if (o.output.empty()) {
        std::cout << payload;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + o.output);
    f << payload;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + o.output);
}

template <typename CsvFn, typename JsonFn>
void deliver_table(const OutputOpts& o, CsvFn&& csv, JsonFn&& json) {
    if (o.format == "json") {
        deliver(o, json());
    } else {
        std::ostringstream ss;
        csv(ss);
        deliver(o, ss.str());
    }
}

struct McCommon {
    std::int64_t samples = 100000;
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    bool quiet = false;
};

void add_mc_common(CLI::App* cmd, McCommon& c, std::int64_t default_samples) {
    c.samples = default_samples;
    cmd->add_option("--samples", c.samples, "Number of Monte Carlo samples")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000000}))
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "Base RNG seed (sample i uses stream (seed, i))")
        ->capture_default_str();
    cmd->add_option("--workers", c.workers, "Worker threads (result is worker-invariant)")
        ->check(CLI::Range(1, 256))
        ->envname("CBS_WORKERS");
    cmd->add_flag("--quiet", c.quiet, "Suppress stderr progress lines");
}

cbs::McReport make_report(const char* statistic, std::int64_t n, std::uint64_t seed,
                          const cbs::Estimate& est, std::optional<double> exact_ref,
                          std::vector<std::pair<std::string, std::int64_t>> params = {}) {
    cbs::McReport r;
    r.statistic = statistic;
    r.n = n;
    r.params = std::move(params);
    r.seed = seed;
    r.estimate = &est;
    r.exact_ref = exact_ref;
    return r;
}

int run_verify(const cbs::AcceptanceConfig& cfg) {
    const auto results = cbs::run_acceptance(cfg, std::cout);
    return cbs::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cbslab: exact recurrences, Monte Carlo simulation, and asymptotic fits\n"
                 "for the critical beta-splitting random tree"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cbslab 1.0.0");
    int exit_code = 0;

    // ----------------------------------------------------------- exact
    auto* exact = app.add_subcommand("exact", "Exact recurrence tables (CSV/JSON)");
    exact->require_subcommand(1);

    // exact moments
    struct {
        std::int64_t n_max = 1000;
        bool quiet = false;
        OutputOpts out;
    } mo;
    {
        auto* c = exact->add_subcommand(
            "moments", "Mean/variance of leaf heights D and L, pair product E[Z], correlation r");
        c->add_option("--n-max", mo.n_max, "Largest n (O(n^2) sweeps)")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{100000}))
            ->capture_default_str();
        c->add_flag("--quiet", mo.quiet, "Suppress stderr progress lines");
        add_output(c, mo.out, "csv");
        c->callback([&] {
            HarmonicTable table(mo.n_max);
            ProgressMeter m1("d moments", !mo.quiet);
            cbs::MomentSeries s = cbs::d_moments(table, mo.n_max, m1.fn());
            ProgressMeter m2("l moments", !mo.quiet);
            cbs::l_moments(table, s, m2.fn());
            ProgressMeter m3("pair product", !mo.quiet);
            cbs::pair_product(table, s, m3.fn());
            deliver_table(
                mo.out, [&](std::ostream& os) { cbs::write_moments_csv(os, s); },
                [&] { return cbs::table_json_moments(s); });
        });
    }

    // exact laplace
    struct {
        std::int64_t n_max = 1000;
        double u = 0.0;
        std::string stat = "d";
        bool quiet = false;
        OutputOpts out;
    } la;
    {
        auto* c = exact->add_subcommand(
            "laplace", "Transform series phi_n(u) = E[exp(u D_n)] or f_n(u) = E[exp(u L_n)]");
        c->add_option("--n-max", la.n_max, "Largest n")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}))
            ->capture_default_str();
        c->add_option("--u", la.u, "Transform argument (d: u < 1; l: |u| <= 5)")
            ->required();
        c->add_option("--stat", la.stat, "Which transform: d (time-height) or l (edge-height)")
            ->check(CLI::IsMember({"d", "l"}))
            ->capture_default_str();
        c->add_flag("--quiet", la.quiet, "Suppress stderr progress lines");
        add_output(c, la.out, "csv");
        c->callback([&] {
            HarmonicTable table(la.n_max);
            const bool is_d = la.stat == "d";
            if (is_d && la.u >= 1.0)
                throw std::domain_error("phi_n(u) requires u < 1");
            if (!is_d && std::fabs(la.u) > 5.0)
                throw std::domain_error("f_n(u) requires |u| <= 5");
            const cbs::LaplaceSeries s = is_d ? cbs::laplace_d(table, la.n_max, la.u)
                                              : cbs::laplace_l(table, la.n_max, la.u);
            const std::string name = is_d ? "phi_d" : "f_l";
            deliver_table(
                la.out, [&](std::ostream& os) { cbs::write_laplace_csv(os, s, name); },
                [&] { return cbs::table_json_laplace(s, name); });
        });
    }

    // exact pruned
    struct {
        std::int64_t n_max = 1000;
        std::int64_t t = 2;
        std::string form = "corrected";
        bool quiet = false;
        OutputOpts out;
    } pr;
    {
        auto* c = exact->add_subcommand(
            "pruned", "E[S_{n,t}] (splits to first separation) and E[S*_{n,t}] (pruned size)");
        c->add_option("--n-max", pr.n_max, "Largest n")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{30000}))
            ->capture_default_str();
        c->add_option("--t", pr.t, "Number of sampled leaves")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{8}))
            ->capture_default_str();
        c->add_option("--form", pr.form,
                      "S* recursion variant (uncorrected is a bias diagnostic only)")
            ->check(CLI::IsMember({"corrected", "uncorrected"}))
            ->capture_default_str();
        c->add_flag("--quiet", pr.quiet, "Suppress stderr progress lines");
        add_output(c, pr.out, "csv");
        c->callback([&] {
            HarmonicTable table(pr.n_max);
            const auto form = pr.form == "corrected"
                                  ? cbs::PrunedLengthForm::corrected
                                  : cbs::PrunedLengthForm::uncorrected_diagnostic;
            const cbs::PrunedTable t = cbs::pruned_table(table, pr.n_max, pr.t, form);
            deliver_table(
                pr.out, [&](std::ostream& os) { cbs::write_pruned_csv(os, t, pr.n_max); },
                [&] { return cbs::table_json_pruned(t, pr.n_max); });
        });
    }

    // exact subtree
    struct {
        std::int64_t n_max = 200;
        std::int64_t t_max = 0;  // 0 = min(n_max, 30)
        double q = 0.5;
        bool quiet = false;
        OutputOpts out;
        CLI::Option* q_opt = nullptr;
    } su;
    {
        auto* c = exact->add_subcommand(
            "subtree", "Subtree-count laws xi/eta/u over the (n,t) triangle, or the pgf F_n(q)");
        c->add_option("--n-max", su.n_max, "Largest n")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}))
            ->capture_default_str();
        c->add_option("--t-max", su.t_max, "Largest t (default min(n_max, 30))")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}));
        su.q_opt = c->add_option(
            "--q", su.q, "Emit the pgf series F_n(q) instead of the triangle (0 < q < 1)");
        c->add_flag("--quiet", su.quiet, "Suppress stderr progress lines");
        add_output(c, su.out, "csv");
        c->callback([&] {
            HarmonicTable table(su.n_max);
            if (su.q_opt->count() > 0) {
                if (!(su.q > 0.0 && su.q < 1.0))
                    throw std::domain_error("--q must lie strictly between 0 and 1");
                const auto F = cbs::subtree_pgf(table, su.n_max, su.q);
                deliver_table(
                    su.out,
                    [&](std::ostream& os) { cbs::write_subtree_pgf_csv(os, su.q, F); },
                    [&] { return cbs::table_json_subtree_pgf(su.q, F); });
                return;
            }
            const std::int64_t t_max =
                su.t_max > 0 ? su.t_max : std::min<std::int64_t>(su.n_max, 30);
            if ((su.n_max + 1) * (t_max + 1) > 20000000)
                throw std::invalid_argument(
                    "triangle too large: (n_max+1)*(t_max+1) must be <= 2e7");
            const cbs::SubtreeTable t = cbs::subtree_distribution(table, su.n_max, t_max);
            deliver_table(
                su.out, [&](std::ostream& os) { cbs::write_subtree_csv(os, t); },
                [&] { return cbs::table_json_subtree(t); });
        });
    }

    // exact lognk
    struct {
        std::int64_t n_max = 10000;
        bool quiet = false;
        OutputOpts out;
    } lk;
    {
        auto* c = exact->add_subcommand(
            "lognk", "Harmonic log-ratio sums and the n^2-scaled remainder residual");
        c->add_option("--n-max", lk.n_max, "Largest n (log-spaced rows above 1024)")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{1000000}))
            ->capture_default_str();
        c->add_flag("--quiet", lk.quiet, "Suppress stderr progress lines");
        add_output(c, lk.out, "csv");
        c->callback([&] {
            std::vector<std::int64_t> grid;
            if (lk.n_max <= 1024) {
                for (std::int64_t n = 2; n <= lk.n_max; ++n) grid.push_back(n);
            } else {
                grid = cbs::log_grid(2, lk.n_max, 256);
            }
            ProgressMeter meter("lognk rows", !lk.quiet);
            std::vector<cbs::LognkRow> rows;
            rows.reserve(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const std::int64_t n = grid[i];
                const double dn = static_cast<double>(n);
                cbs::LognkRow row;
                row.n = n;
                row.sum1 = cbs::logratio_sum(n);
                row.sum2 = cbs::logratio_sq_sum(n);
                row.residual_n2 = (row.sum1 - cbs::logratio_remainder(n)) * dn * dn;
                rows.push_back(row);
                meter.update(static_cast<std::int64_t>(i + 1),
                             static_cast<std::int64_t>(grid.size()));
            }
            deliver_table(
                lk.out, [&](std::ostream& os) { cbs::write_lognk_csv(os, rows); },
                [&] { return cbs::table_json_lognk(rows); });
        });
    }

    // ----------------------------------------------------------- simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates (JSON report)");
    simulate->require_subcommand(1);

    // simulate leaf
    struct {
        std::int64_t n = 1000;
        std::string stat = "d";
        std::vector<double> thresholds;
        McCommon mc;
        OutputOpts out;
    } sl;
    {
        auto* c = simulate->add_subcommand(
            "leaf", "Height of one uniform leaf: D (time) or L (edge count)");
        c->add_option("--n", sl.n, "Number of leaves")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{10000000}))
            ->capture_default_str();
        c->add_option("--stat", sl.stat, "d (time-height) or l (edge-height)")
            ->check(CLI::IsMember({"d", "l"}))
            ->capture_default_str();
        c->add_option("--threshold", sl.thresholds, "Tail threshold(s): count samples >= x");
        add_mc_common(c, sl.mc, 100000);
        add_output(c, sl.out, "json");
        c->callback([&] {
            if (sl.out.format != "json")
                throw std::invalid_argument("simulate reports are JSON only");
            HarmonicTable table(sl.n);
            const bool is_d = sl.stat == "d";
            cbs::McConfig cfg;
            cfg.stat = is_d ? cbs::Statistic::leaf_D : cbs::Statistic::leaf_L;
            cfg.n = sl.n;
            cfg.samples = sl.mc.samples;
            cfg.seed = sl.mc.seed;
            cfg.workers = sl.mc.workers;
            cfg.thresholds = sl.thresholds;
            ProgressMeter meter("simulate leaf", !sl.mc.quiet);
            cfg.progress = meter.fn();
            const cbs::Estimate est = cbs::run_mc(table, cfg);
            std::optional<double> ref;
            if (sl.n <= 10000) {
                cbs::MomentSeries s = cbs::d_moments(table, sl.n);
                if (!is_d) cbs::l_moments(table, s);
                ref = is_d ? s.e_d[static_cast<std::size_t>(sl.n)]
                           : s.e_l[static_cast<std::size_t>(sl.n)];
            }
            deliver(sl.out, cbs::mc_report_json(make_report(
                                cbs::statistic_name(cfg.stat), sl.n, sl.mc.seed, est, ref)));
        });
    }

    // simulate pair
    struct {
        std::int64_t n = 1000;
        std::vector<double> thresholds;
        McCommon mc;
        OutputOpts out;
    } sp;
    {
        auto* c = simulate->add_subcommand(
            "pair", "Product of the time-heights of two distinct uniform leaves");
        c->add_option("--n", sp.n, "Number of leaves")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{10000000}))
            ->capture_default_str();
        c->add_option("--threshold", sp.thresholds, "Tail threshold(s)");
        add_mc_common(c, sp.mc, 100000);
        add_output(c, sp.out, "json");
        c->callback([&] {
            if (sp.out.format != "json")
                throw std::invalid_argument("simulate reports are JSON only");
            HarmonicTable table(sp.n);
            cbs::McConfig cfg;
            cfg.stat = cbs::Statistic::pair_product;
            cfg.n = sp.n;
            cfg.samples = sp.mc.samples;
            cfg.seed = sp.mc.seed;
            cfg.workers = sp.mc.workers;
            cfg.thresholds = sp.thresholds;
            ProgressMeter meter("simulate pair", !sp.mc.quiet);
            cfg.progress = meter.fn();
            const cbs::Estimate est = cbs::run_mc(table, cfg);
            std::optional<double> ref;
            if (sp.n <= 10000) {
                cbs::MomentSeries s = cbs::d_moments(table, sp.n);
                cbs::pair_product(table, s);
                ref = s.e_z[static_cast<std::size_t>(sp.n)];
            }
            deliver(sp.out, cbs::mc_report_json(make_report("pair_product", sp.n, sp.mc.seed,
                                                            est, ref)));
        });
    }

    // simulate occupancy
    struct {
        std::int64_t n = 1000;
        std::int64_t t = 2;
        std::string stat = "s";
        std::vector<double> thresholds;
        McCommon mc;
        OutputOpts out;
    } so;
    {
        auto* c = simulate->add_subcommand(
            "occupancy", "Occupancy chain of t sampled leaves: S (splits to separation) or "
                         "S* (pruned-tree size)");
        c->add_option("--n", so.n, "Number of leaves")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{10000000}))
            ->capture_default_str();
        c->add_option("--t", so.t, "Number of sampled leaves (2 <= t <= n)")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{1000000}))
            ->capture_default_str();
        c->add_option("--stat", so.stat, "s or sstar")
            ->check(CLI::IsMember({"s", "sstar"}))
            ->capture_default_str();
        c->add_option("--threshold", so.thresholds, "Tail threshold(s)");
        add_mc_common(c, so.mc, 100000);
        add_output(c, so.out, "json");
        c->callback([&] {
            if (so.out.format != "json")
                throw std::invalid_argument("simulate reports are JSON only");
            if (so.t > so.n) throw std::domain_error("--t must not exceed --n");
            HarmonicTable table(so.n);
            const bool is_s = so.stat == "s";
            cbs::McConfig cfg;
            cfg.stat = is_s ? cbs::Statistic::occupancy_S : cbs::Statistic::occupancy_Sstar;
            cfg.n = so.n;
            cfg.t = so.t;
            cfg.samples = so.mc.samples;
            cfg.seed = so.mc.seed;
            cfg.workers = so.mc.workers;
            cfg.thresholds = so.thresholds;
            ProgressMeter meter("simulate occupancy", !so.mc.quiet);
            cfg.progress = meter.fn();
            const cbs::Estimate est = cbs::run_mc(table, cfg);
            std::optional<double> ref;
            if (is_s && so.n <= 10000 && so.t <= 12) {
                ref = cbs::branch_split_expectation(table, so.n, so.t)
                          .e_s[static_cast<std::size_t>(so.n)];
            } else if (!is_s && so.n <= 10000 && so.t <= 8) {
                ref = cbs::pruned_length_expectation(table, so.n, so.t)
                          .e_sstar[static_cast<std::size_t>(so.n)];
            }
            deliver(so.out,
                    cbs::mc_report_json(make_report(cbs::statistic_name(cfg.stat), so.n,
                                                    so.mc.seed, est, ref, {{"t", so.t}})));
        });
    }

    // simulate tree
    struct {
        std::int64_t n = 1000;
        std::vector<std::int64_t> census_t;
        std::vector<double> thr_d, thr_l;
        McCommon mc;
        OutputOpts out;
    } st;
    {
        auto* c = simulate->add_subcommand(
            "tree", "Whole trees: height maxima with tails, subtree census, structure checks");
        c->add_option("--n", st.n, "Number of leaves per tree")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{1000000}))
            ->capture_default_str();
        c->add_option("--census-t", st.census_t,
                      "Subtree sizes t to census (default 2 3 5)");
        c->add_option("--threshold-d", st.thr_d,
                      "Tail thresholds for max time-height (default 3 log n)");
        c->add_option("--threshold-l", st.thr_l,
                      "Tail thresholds for max edge-height (default 43 log^2 n)");
        add_mc_common(c, st.mc, 10000);
        add_output(c, st.out, "json");
        c->callback([&] {
            if (st.out.format != "json")
                throw std::invalid_argument("simulate reports are JSON only");
            HarmonicTable table(st.n);
            const double ln = std::log(static_cast<double>(st.n));
            std::vector<std::int64_t> census = st.census_t;
            if (census.empty()) census = {2, 3, 5};
            for (std::int64_t t : census)
                if (t < 1 || t > st.n)
                    throw std::domain_error("--census-t entries must lie in [1, n]");
            std::vector<double> thr_d = st.thr_d.empty() ? std::vector<double>{3.0 * ln}
                                                         : st.thr_d;
            std::vector<double> thr_l =
                st.thr_l.empty() ? std::vector<double>{43.0 * ln * ln} : st.thr_l;
            ProgressMeter meter("simulate tree", !st.mc.quiet);
            const cbs::TreeBatch batch =
                cbs::run_tree_batch(table, st.n, st.mc.samples, st.mc.seed, st.mc.workers,
                                    census, thr_d, thr_l, meter.fn());

            cbs::TailReport tails;
            tails.n = st.n;
            tails.samples = batch.max_d.count();
            tails.max_d = batch.max_d;
            tails.max_l = batch.max_l;
            auto fill = [](const cbs::Estimate& est, std::vector<cbs::TailEntry>& out) {
                for (std::size_t i = 0; i < est.thresholds().size(); ++i) {
                    cbs::TailEntry e;
                    e.threshold = est.thresholds()[i];
                    e.count = est.tail_counts()[i];
                    e.freq = est.count() > 0 ? static_cast<double>(e.count) /
                                                   static_cast<double>(est.count())
                                             : 0.0;
                    e.ci95 = cbs::binomial_ci(e.count, est.count(), 0.95);
                    out.push_back(e);
                }
            };
            fill(tails.max_d, tails.tails_d);
            fill(tails.max_l, tails.tails_l);
            tails.ratio_d = tails.max_d.mean() / ln;
            tails.ratio_l = tails.max_l.mean() / (ln * ln);

            cbs::TreeReport report;
            report.n = st.n;
            report.seed = st.mc.seed;
            report.tails = &tails;
            report.census_t = batch.census_t;
            report.violations = batch.violations;
            std::vector<std::optional<double>> census_exact(census.size());
            const std::int64_t t_hi = *std::max_element(census.begin(), census.end());
            if (st.n <= 30000 && (st.n + 1) * (t_hi + 1) <= 20000000) {
                const cbs::SubtreeTable tri = cbs::subtree_distribution(table, st.n, t_hi);
                for (std::size_t i = 0; i < census.size(); ++i)
                    census_exact[i] = tri.xi_at(st.n, census[i]);
            }
            report.census_exact = census_exact;
            for (const cbs::Estimate& e : batch.census) report.census.push_back(&e);
            deliver(st.out, cbs::tree_report_json(report));
        });
    }

    // ----------------------------------------------------------- fit
    auto* fit = app.add_subcommand("fit", "Asymptotic-constant extraction (text summary)");
    fit->require_subcommand(1);

    // fit ansatz
    struct {
        std::int64_t n_max = 400000;
        std::int64_t window_min = 10000;
        bool quiet = false;
        OutputOpts out;
    } fa;
    {
        auto* c = fit->add_subcommand(
            "ansatz", "Fit e_d[n] - log(n)/zeta(2) = c0 + c1/n on a deep mean-only sweep");
        c->add_option("--n-max", fa.n_max, "Sweep depth (O(n^2): minutes at 4e5)")
            ->check(CLI::Range(std::int64_t{100}, std::int64_t{2000000}))
            ->capture_default_str();
        c->add_option("--window-min", fa.window_min, "Lower fit-window edge (n_max >= 10x this)")
            ->check(CLI::Range(std::int64_t{10}, std::int64_t{200000}))
            ->capture_default_str();
        c->add_flag("--quiet", fa.quiet, "Suppress stderr progress lines");
        c->add_option("--output,-o", fa.out.output, "Write to this file instead of stdout");
        c->callback([&] {
            HarmonicTable table(fa.n_max);
            ProgressMeter meter("e_d sweep", !fa.quiet);
            const auto e_d = cbs::d_mean_only(table, fa.n_max, meter.fn());
            const cbs::AnsatzFit f = cbs::fit_ansatz(e_d, fa.window_min, fa.n_max);
            char buf[512];
            std::snprintf(buf, sizeof(buf),
                          "ansatz fit  e_d[n] ~ log(n)/zeta(2) + c0 + c1/n\n"
                          "  window      [%" PRId64 ", %" PRId64 "], %" PRId64
                          " log-spaced points\n"
                          "  c0          %.10f   (pinned reference %.10f, diff %+.3e)\n"
                          "  c1          %.6f\n"
                          "  max |resid| %.3e\n",
                          f.n_min, f.n_max, f.points, f.c0, cbs::kC0Reference,
                          f.c0 - cbs::kC0Reference, f.c1, f.residual_max);
            deliver(fa.out, buf);
        });
    }

    // fit slopes
    struct {
        std::int64_t n_max = 100000;
        bool quiet = false;
        OutputOpts out;
    } fs;
    {
        auto* c = fit->add_subcommand(
            "slopes", "Variance/mean slopes of D and L against powers of log n");
        c->add_option("--n-max", fs.n_max, "Largest n (window is [1e3, n_max])")
            ->check(CLI::Range(std::int64_t{2000}, std::int64_t{100000}))
            ->capture_default_str();
        c->add_flag("--quiet", fs.quiet, "Suppress stderr progress lines");
        c->add_option("--output,-o", fs.out.output, "Write to this file instead of stdout");
        c->callback([&] {
            HarmonicTable table(fs.n_max);
            ProgressMeter m1("d moments", !fs.quiet);
            cbs::MomentSeries s = cbs::d_moments(table, fs.n_max, m1.fn());
            ProgressMeter m2("l moments", !fs.quiet);
            cbs::l_moments(table, s, m2.fn());
            const cbs::ZetaConstants z = cbs::zeta_constants();
            const double z23 = z.zeta2 * z.zeta2 * z.zeta2;
            const std::int64_t lo = 1000;
            const auto fd = cbs::fit_slope(s.v_d, cbs::SlopeTransform::log_n, lo, fs.n_max);
            const auto fl = cbs::fit_slope(s.v_l, cbs::SlopeTransform::log3_n, lo, fs.n_max);
            std::vector<double> resid(s.e_l.size(), 0.0);
            for (std::size_t n = 2; n < resid.size(); ++n) {
                const double lg = std::log(static_cast<double>(n));
                resid[n] = s.e_l[n] - lg * lg / (2.0 * z.zeta2);
            }
            const auto fm = cbs::fit_slope(resid, cbs::SlopeTransform::log_n, lo, fs.n_max);
            const double td = 2.0 * z.zeta3 / z23;
            const double tl = 2.0 * z.zeta3 / (3.0 * z23);
            const double tm = (z.euler_gamma * z.zeta2 + z.zeta3) / (z.zeta2 * z.zeta2);
            char buf[1024];
            std::snprintf(
                buf, sizeof(buf),
                "slope fits on [%" PRId64 ", %" PRId64 "]\n"
                "  var_d  vs log n    slope %.8f   target 2 zeta3/zeta2^3        = %.8f  "
                "(rel %+.3f%%)\n"
                "  var_l  vs log^3 n  slope %.8f   target 2 zeta3/(3 zeta2^3)    = %.8f  "
                "(rel %+.3f%%)\n"
                "  e_l - log^2 n/(2 zeta2) vs log n\n"
                "                     slope %.8f   target (g z2 + z3)/z2^2       = %.8f  "
                "(rel %+.3f%%)\n",
                lo, fs.n_max, fd.slope, td, 100.0 * (fd.slope / td - 1.0), fl.slope, tl,
                100.0 * (fl.slope / tl - 1.0), fm.slope, tm, 100.0 * (fm.slope / tm - 1.0));
            deliver(fs.out, buf);
        });
    }

    // fit alpha
    struct {
        std::int64_t n_max = 30000;
        std::int64_t t_max = 5;
        bool quiet = false;
        OutputOpts out;
    } fal;
    {
        auto* c = fit->add_subcommand(
            "alpha", "Arbitrate the two alpha(t) readings against exact E[S*] slopes");
        c->add_option("--n-max", fal.n_max, "Largest n (window is [1e3, n_max])")
            ->check(CLI::Range(std::int64_t{2000}, std::int64_t{30000}))
            ->capture_default_str();
        c->add_option("--t-max", fal.t_max, "Largest t")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{8}))
            ->capture_default_str();
        c->add_flag("--quiet", fal.quiet, "Suppress stderr progress lines");
        c->add_option("--output,-o", fal.out.output, "Write to this file instead of stdout");
        c->callback([&] {
            HarmonicTable table(fal.n_max);
            ProgressMeter meter("pruned-length levels", !fal.quiet);
            const auto levels = cbs::pruned_length_levels(
                table, fal.n_max, fal.t_max, cbs::PrunedLengthForm::corrected, meter.fn());
            std::string text =
                "alpha(t) arbitration: slope of E[S*_{n,t}] vs log n on [1000, " +
                std::to_string(fal.n_max) + "]\n" +
                "   t      slope   alpha_inclusive  alpha_restricted  verdict\n";
            for (std::int64_t t = 2; t <= fal.t_max; ++t) {
                const auto res = cbs::resolve_alpha_t(levels[static_cast<std::size_t>(t)], t,
                                                      1000, fal.n_max);
                char line[256];
                std::snprintf(line, sizeof(line), "  %2" PRId64 "  %9.4f  %15.6g  %16.6f  %s\n",
                              t, res.slope, res.alpha_inclusive, res.alpha_restricted,
                              res.verdict.c_str());
                text += line;
            }
            deliver(fal.out, text);
        });
    }

    // ----------------------------------------------------------- constants
    struct {
        OutputOpts out;
    } co;
    {
        auto* c = app.add_subcommand("constants",
                                     "Closed-form and derived constants used throughout");
        c->add_option("--output,-o", co.out.output, "Write to this file instead of stdout");
        c->callback([&] {
            const cbs::ZetaConstants z = cbs::zeta_constants();
            const cbs::BetaHeight b = cbs::beta_height_constant();
            const double z22 = z.zeta2 * z.zeta2;
            const double z23 = z22 * z.zeta2;
            char buf[2048];
            int off = std::snprintf(
                buf, sizeof(buf),
                "zeta(2)                    %.17g\n"
                "zeta(3)                    %.17g\n"
                "zeta(4)                    %.17g\n"
                "euler_gamma                %.17g\n"
                "beta (height-tail rate)    %.10f   (argmin alpha = %.10f)\n"
                "derived slope constants\n"
                "  1/zeta(2)                %.17g   (mean D / log n)\n"
                "  2 zeta3/zeta2^3          %.17g   (var D / log n)\n"
                "  1/(2 zeta2)              %.17g   (mean L / log^2 n)\n"
                "  (g z2 + z3)/z2^2         %.17g   (mean L secondary / log n)\n"
                "  2 zeta3/(3 zeta2^3)      %.17g   (var L / log^3 n)\n"
                "pinned fitted references\n"
                "  c0                       %.10f\n"
                "  c1                       %.6f\n"
                "alpha(t) under both summation readings\n"
                "   t    inclusive     restricted\n",
                z.zeta2, z.zeta3, z.zeta4, z.euler_gamma, b.beta, b.argmin_alpha,
                1.0 / z.zeta2, 2.0 * z.zeta3 / z23, 1.0 / (2.0 * z.zeta2),
                (z.euler_gamma * z.zeta2 + z.zeta3) / z22, 2.0 * z.zeta3 / (3.0 * z23),
                cbs::kC0Reference, cbs::kC1Reference);
            for (std::int64_t t = 2; t <= 8; ++t) {
                off += std::snprintf(buf + off, sizeof(buf) - static_cast<std::size_t>(off),
                                     "  %2" PRId64 "  %11.6g  %13.6g\n", t,
                                     cbs::alpha_t(t, cbs::AlphaVariant::inclusive),
                                     cbs::alpha_t(t, cbs::AlphaVariant::restricted));
            }
            deliver(co.out, buf);
        });
    }

    // ----------------------------------------------------------- verify
    struct {
        cbs::AcceptanceConfig cfg;
        bool quiet = false;
    } ve;
    {
        auto* c = app.add_subcommand(
            "verify", "Run the acceptance suite; exit 0 iff every criterion passes");
        c->add_flag("--fast", ve.cfg.fast,
                    "Reduced budgets (shrunk windows are tagged [fast-subset])");
        c->add_option("--seed", ve.cfg.seed, "Base RNG seed")->capture_default_str();
        c->add_option("--workers", ve.cfg.workers, "Worker threads")
            ->check(CLI::Range(1, 256))
            ->envname("CBS_WORKERS");
        c->add_flag("--quiet", ve.quiet, "Suppress stderr progress lines");
        c->callback([&] {
            ve.cfg.progress = !ve.quiet;
            exit_code = run_verify(ve.cfg);
        });
    }

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }
        return exit_code;
    } catch (const std::bad_alloc&) {
        std::fprintf(stderr, "error: out of memory\n");
        return 3;
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "error: allocation too large: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
