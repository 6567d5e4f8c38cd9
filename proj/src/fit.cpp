#include "cbs/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbs {

namespace {

/// Solves the 2x2 normal equations for y ~ a + b*x.
struct LinFit {
    double a = 0.0, b = 0.0;
};

LinFit ols2(const std::vector<double>& x, const std::vector<double>& y) {
    const auto m = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = m * sxx - sx * sx;
    if (!(std::abs(det) > 0.0)) throw std::runtime_error("degenerate fit design");
    return LinFit{(sxx * sy - sx * sxy) / det, (m * sxy - sx * sy) / det};
}

void check_window(std::size_t have_n_max, std::int64_t n_min, std::int64_t n_max) {
    if (n_min < 2 || n_max <= n_min)
        throw std::invalid_argument("fit window must satisfy 2 <= n_min < n_max");
    if (static_cast<std::size_t>(n_max) + 1 > have_n_max)
        throw std::invalid_argument("fit window exceeds available series length");
}

}  // namespace

std::vector<std::int64_t> log_grid(std::int64_t n_min, std::int64_t n_max, int count) {
    std::vector<std::int64_t> grid;
    if (count < 2) count = 2;
    const double lo = std::log(static_cast<double>(n_min));
    const double hi = std::log(static_cast<double>(n_max));
    grid.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        const auto n = static_cast<std::int64_t>(std::llround(std::exp(lo + f * (hi - lo))));
        grid.push_back(std::clamp(n, n_min, n_max));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

AnsatzFit fit_ansatz(const std::vector<double>& e_d, std::int64_t n_min, std::int64_t n_max) {
    check_window(e_d.size(), n_min, n_max);
    if (n_max < 10 * n_min)
        throw std::invalid_argument("ansatz window requires n_max >= 10*n_min");
    const auto grid = log_grid(n_min, n_max);
    std::vector<double> x, y;
    x.reserve(grid.size());
    y.reserve(grid.size());
    for (const auto n : grid) {
        x.push_back(1.0 / static_cast<double>(n));
        y.push_back(e_d[static_cast<std::size_t>(n)] -
                    std::log(static_cast<double>(n)) / zeta_constants().zeta2);
    }
    const auto fit = ols2(x, y);
    AnsatzFit out;
    out.c0 = fit.a;
    out.c1 = fit.b;
    out.n_min = n_min;
    out.n_max = n_max;
    out.points = static_cast<std::int64_t>(grid.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out.residual_max = std::max(out.residual_max, std::abs(y[i] - fit.a - fit.b * x[i]));
    return out;
}

SlopeFit fit_slope(const std::vector<double>& series, SlopeTransform transform,
                   std::int64_t n_min, std::int64_t n_max) {
    check_window(series.size(), n_min, n_max);
    const auto grid = log_grid(n_min, n_max);
    std::vector<double> x, y;
    x.reserve(grid.size());
    y.reserve(grid.size());
    for (const auto n : grid) {
        const double ln = std::log(static_cast<double>(n));
        double t = ln;
        if (transform == SlopeTransform::log2_n) t = ln * ln;
        if (transform == SlopeTransform::log3_n) t = ln * ln * ln;
        x.push_back(t);
        y.push_back(series[static_cast<std::size_t>(n)]);
    }
    const auto fit = ols2(x, y);
    SlopeFit out;
    out.slope = fit.b;
    out.intercept = fit.a;
    out.n_min = n_min;
    out.n_max = n_max;
    out.points = static_cast<std::int64_t>(grid.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.a + fit.b * x[i];
        const double denom = std::max(std::abs(y[i]), 1e-300);
        out.max_rel_residual = std::max(out.max_rel_residual, std::abs(y[i] - pred) / denom);
    }
    return out;
}

AlphaResolution resolve_alpha_t(const std::vector<double>& e_sstar, std::int64_t t,
                                std::int64_t n_min, std::int64_t n_max) {
    const auto fit = fit_slope(e_sstar, SlopeTransform::log_n, n_min, n_max);
    AlphaResolution out;
    out.t = t;
    out.slope = fit.slope;
    out.alpha_inclusive = alpha_t(t, AlphaVariant::inclusive);
    out.alpha_restricted = alpha_t(t, AlphaVariant::restricted);
    const auto rel = [&](double alpha) {
        if (!std::isfinite(alpha)) return std::numeric_limits<double>::infinity();
        return std::abs(fit.slope - alpha) / std::max(std::abs(alpha), 1e-300);
    };
    out.rel_dist_inclusive = rel(out.alpha_inclusive);
    out.rel_dist_restricted = rel(out.alpha_restricted);
    const double best = std::min(out.rel_dist_inclusive, out.rel_dist_restricted);
    if (best > 0.20)
        out.verdict = "neither";
    else if (out.rel_dist_restricted <= out.rel_dist_inclusive)
        out.verdict = "restricted";
    else
        out.verdict = "inclusive";
    return out;
}

double predict(PredictStatistic stat, double n, std::int64_t t) {
    const double ln = std::log(n);
    const ZetaConstants zc = zeta_constants();
    const double z2 = zc.zeta2;
    const double z3 = zc.zeta3;
    const double g = zc.euler_gamma;
    switch (stat) {
        case PredictStatistic::mean_d:
            return ln / z2 + kC0Reference + kC1Reference / n;
        case PredictStatistic::var_d:
            return (2.0 * z3 / (z2 * z2 * z2)) * ln + kVarDIntercept;
        case PredictStatistic::mean_l:
            return ln * ln / (2.0 * z2) + ((g * z2 + z3) / (z2 * z2)) * ln + kMeanLIntercept;
        case PredictStatistic::var_l:
            return (2.0 * z3 / (3.0 * z2 * z2 * z2)) * ln * ln * ln + kVarLResidual[2] * ln * ln +
                   kVarLResidual[1] * ln + kVarLResidual[0];
        case PredictStatistic::mean_s: {
            HarmonicTable h(static_cast<std::size_t>(t));
            return ln / h.h(static_cast<std::size_t>(t - 1));
        }
        case PredictStatistic::mean_sstar:
            return alpha_t(t, AlphaVariant::restricted) * ln;
        case PredictStatistic::mean_subtree_size:
            // 3/(2 pi^2) = 1/(4 zeta2).
            return 0.25 / z2 * ln * ln;
    }
    throw std::logic_error("unknown predictor");
}

CltParams fit_corrections(const MomentSeries& series, std::int64_t n_min, std::int64_t n_max) {
    if (n_max <= 0 || static_cast<std::size_t>(n_max) + 1 > series.e_d.size())
        throw std::invalid_argument("correction window exceeds series length");
    if (n_min <= 0) n_min = n_max / 10;
    if (n_min < 16) n_min = 16;
    const auto grid = log_grid(n_min, n_max);
    const ZetaConstants zc = zeta_constants();
    const double z2 = zc.zeta2;
    const double z3 = zc.zeta3;
    const double g = zc.euler_gamma;
    const double vd_lead = 2.0 * z3 / (z2 * z2 * z2);
    const double ml_lead2 = 1.0 / (2.0 * z2);
    const double ml_lead1 = (g * z2 + z3) / (z2 * z2);
    const double vl_lead = 2.0 * z3 / (3.0 * z2 * z2 * z2);

    CltParams p;
    p.corrected = true;

    // Intercepts with the leading coefficients pinned to their exact values:
    // subtract the known part and average / low-order fit what remains.
    {
        const auto fit = fit_ansatz(series.e_d, n_min, n_max);
        p.c0 = fit.c0;
    }
    {
        double acc = 0.0;
        for (const auto n : grid)
            acc += series.v_d[static_cast<std::size_t>(n)] -
                   vd_lead * std::log(static_cast<double>(n));
        p.var_d_intercept = acc / static_cast<double>(grid.size());
    }
    {
        double acc = 0.0;
        for (const auto n : grid) {
            const double ln = std::log(static_cast<double>(n));
            acc += series.e_l[static_cast<std::size_t>(n)] - ml_lead2 * ln * ln - ml_lead1 * ln;
        }
        p.mean_l_intercept = acc / static_cast<double>(grid.size());
    }
    {
        // Quadratic-in-log residual of Var[L] after removing the cubic term.
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, sxxx = 0.0, sxxxx = 0.0, sxxy = 0.0;
        for (const auto n : grid) {
            const double ln = std::log(static_cast<double>(n));
            const double resid =
                series.v_l[static_cast<std::size_t>(n)] - vl_lead * ln * ln * ln;
            sx += ln;
            sy += resid;
            sxx += ln * ln;
            sxy += ln * resid;
            sxxx += ln * ln * ln;
            sxxxx += ln * ln * ln * ln;
            sxxy += ln * ln * resid;
        }
        // Normal equations for resid ~ a + b*ln + c*ln^2 (3x3 Cramer).
        const double m = static_cast<double>(grid.size());
        const double a11 = m, a12 = sx, a13 = sxx;
        const double a22 = sxx, a23 = sxxx, a33 = sxxxx;
        const double b1 = sy, b2 = sxy, b3 = sxxy;
        const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                           a13 * (a12 * a23 - a22 * a13);
        if (!(std::abs(det) > 0.0)) throw std::runtime_error("degenerate var_l correction fit");
        const double da = b1 * (a22 * a33 - a23 * a23) - a12 * (b2 * a33 - a23 * b3) +
                          a13 * (b2 * a23 - a22 * b3);
        const double db = a11 * (b2 * a33 - a23 * b3) - b1 * (a12 * a33 - a23 * a13) +
                          a13 * (a12 * b3 - b2 * a13);
        const double dc = a11 * (a22 * b3 - b2 * a23) - a12 * (a12 * b3 - b2 * a13) +
                          b1 * (a12 * a23 - a22 * a13);
        p.var_l_resid[0] = da / det;
        p.var_l_resid[1] = db / det;
        p.var_l_resid[2] = dc / det;
    }
    return p;
}

}  // namespace cbs
