#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "cbs/constants.hpp"
#include "cbs/fit.hpp"
#include "cbs/series.hpp"

using namespace cbs;

namespace {
/// Shared exact moments to n = 2e4 (built once; several cases below use it).
const MomentSeries& deep_moments() {
    static const MomentSeries s = [] {
        HarmonicTable table(20000);
        MomentSeries m = d_moments(table, 20000);
        l_moments(table, m);
        return m;
    }();
    return s;
}
}  // namespace

TEST_CASE("log_grid: endpoints, ordering, and uniqueness") {
    const auto g = log_grid(10, 1000, 16);
    REQUIRE(g.size() >= 2);
    CHECK(g.front() == 10);
    CHECK(g.back() == 1000);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    // count < 2 collapses to the two endpoints.
    const auto two = log_grid(10, 1000, 1);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == 10);
    CHECK(two[1] == 1000);
    // Narrow ranges deduplicate to the available integers.
    const auto narrow = log_grid(5, 8, 64);
    REQUIRE(narrow.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(narrow[i] == static_cast<std::int64_t>(5 + i));
}

TEST_CASE("fit_ansatz: exact recovery on synthetic data") {
    const ZetaConstants z = zeta_constants();
    std::vector<double> v(5001, 0.0);
    for (std::size_t n = 1; n <= 5000; ++n)
        v[n] = std::log(static_cast<double>(n)) / z.zeta2 + 0.75 - 0.3 / static_cast<double>(n);
    const AnsatzFit fit = fit_ansatz(v, 100, 5000);
    CHECK(fit.c0 == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(fit.c1 == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(fit.residual_max < 1e-12);
    CHECK(fit.points > 10);
    CHECK(fit.n_min == 100);
    CHECK(fit.n_max == 5000);
    // Window preconditions.
    CHECK_THROWS_AS((void)fit_ansatz(v, 1, 5000), std::invalid_argument);
    CHECK_THROWS_AS((void)fit_ansatz(v, 600, 5000), std::invalid_argument);  // < 10x span
    CHECK_THROWS_AS((void)fit_ansatz(v, 100, 6000), std::invalid_argument);  // beyond series
    CHECK_THROWS_AS((void)fit_ansatz(v, 500, 400), std::invalid_argument);
}

TEST_CASE("fit_slope: exact recovery for each transform") {
    std::vector<double> s1(3001, 0.0), s3(3001, 0.0);
    for (std::size_t n = 2; n <= 3000; ++n) {
        const double ln = std::log(static_cast<double>(n));
        s1[n] = 3.0 + 2.0 * ln;
        s3[n] = -1.0 + 0.25 * ln * ln * ln;
    }
    const SlopeFit f1 = fit_slope(s1, SlopeTransform::log_n, 10, 3000);
    CHECK(f1.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f1.intercept == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(f1.max_rel_residual < 1e-12);
    const SlopeFit f3 = fit_slope(s3, SlopeTransform::log3_n, 10, 3000);
    CHECK(f3.slope == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(f3.intercept == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("resolve_alpha_t: synthetic slopes produce every verdict") {
    auto synth = [](double slope) {
        std::vector<double> v(3001, 0.0);
        for (std::size_t n = 2; n <= 3000; ++n)
            v[n] = 5.0 + slope * std::log(static_cast<double>(n));
        return v;
    };
    // t = 2: the inclusive reading diverges, so a unit slope reads restricted.
    const AlphaResolution r2 = resolve_alpha_t(synth(1.0), 2, 100, 3000);
    CHECK(std::isinf(r2.alpha_inclusive));
    CHECK(r2.alpha_restricted == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r2.verdict == "restricted");
    CHECK(r2.rel_dist_restricted < 1e-10);
    // t = 3: inclusive = 2, restricted = 1.
    const AlphaResolution rin = resolve_alpha_t(synth(2.0), 3, 100, 3000);
    CHECK(rin.verdict == "inclusive");
    CHECK(rin.rel_dist_inclusive < 1e-10);
    const AlphaResolution rres = resolve_alpha_t(synth(1.08), 3, 100, 3000);
    CHECK(rres.verdict == "restricted");
    CHECK(rres.rel_dist_restricted == doctest::Approx(0.08).epsilon(1e-8));
    // Midway between the two readings: both farther than 20%.
    const AlphaResolution rnone = resolve_alpha_t(synth(1.55), 3, 100, 3000);
    CHECK(rnone.verdict == "neither");
    CHECK(rnone.rel_dist_inclusive == doctest::Approx(0.225).epsilon(1e-8));
}

TEST_CASE("predict: closed forms and agreement with the exact engine") {
    const ZetaConstants z = zeta_constants();
    const double n = 20000.0, ln = std::log(n);
    // Closed-form statistics are evaluated literally.
    CHECK(predict(PredictStatistic::mean_s, n, 2) == doctest::Approx(ln).epsilon(1e-14));
    CHECK(predict(PredictStatistic::mean_sstar, n, 2) == doctest::Approx(ln).epsilon(1e-14));
    CHECK(predict(PredictStatistic::mean_subtree_size, n) ==
          doctest::Approx(0.25 * ln * ln / z.zeta2).epsilon(1e-14));
    // Fitted-constant predictors track the exact series at n = 2e4.
    const MomentSeries& s = deep_moments();
    CHECK(std::fabs(predict(PredictStatistic::mean_d, n) - s.e_d[20000]) < 1e-5);
    CHECK(std::fabs(predict(PredictStatistic::var_d, n) - s.v_d[20000]) < 1e-3);
    CHECK(std::fabs(predict(PredictStatistic::mean_l, n) - s.e_l[20000]) < 1e-3);
    CHECK(std::fabs(predict(PredictStatistic::var_l, n) - s.v_l[20000]) < 5e-2);
}

TEST_CASE("fit_corrections: re-derived constants agree with the pinned ones") {
    const MomentSeries& s = deep_moments();
    const CltParams p = fit_corrections(s, 2000, 20000);
    CHECK(p.corrected);
    CHECK(std::fabs(p.c0 - kC0Reference) < 1e-4);
    CHECK(std::fabs(p.var_d_intercept - kVarDIntercept) < 0.02);
    CHECK(std::fabs(p.mean_l_intercept - kMeanLIntercept) < 0.02);
    // The quadratic Var[L] residual: compare fitted and pinned values at an
    // interior point rather than coefficient-by-coefficient (better posed).
    const double ln = std::log(5000.0);
    const double fitted = p.var_l_resid[0] + p.var_l_resid[1] * ln + p.var_l_resid[2] * ln * ln;
    const double pinned = kVarLResidual[0] + kVarLResidual[1] * ln + kVarLResidual[2] * ln * ln;
    CHECK(std::fabs(fitted - pinned) < 0.3);
    // n_min <= 0 falls back to n_max/10.
    const CltParams q = fit_corrections(s, 0, 20000);
    CHECK(std::fabs(q.c0 - kC0Reference) < 1e-4);
    CHECK_THROWS_AS((void)fit_corrections(s, 100, 50000), std::invalid_argument);
}
