#include "cbs/constants.hpp"

#include <cmath>
#include <limits>

namespace cbs {

ZetaConstants zeta_constants() {
    const double pi = 3.14159265358979323846;
    return ZetaConstants{
        pi * pi / 6.0,
        1.2020569031595942854,
        pi * pi * pi * pi / 90.0,
        0.5772156649015328606,
    };
}

HarmonicTable::HarmonicTable(std::int64_t n_max) {
    if (n_max < 0) throw std::domain_error("HarmonicTable: n_max must be >= 0");
    const auto count = static_cast<std::size_t>(n_max) + 1;
    h_.resize(count);
    inv_.resize(count);
    h_[0] = 0.0;
    inv_[0] = 0.0;  // never used; keeps indexing direct
    for (std::size_t k = 1; k < count; ++k) {
        inv_[k] = 1.0 / static_cast<double>(k);
        h_[k] = h_[k - 1] + inv_[k];
    }
}

SplitLaw::SplitLaw(const HarmonicTable& table, std::int64_t m) : table_(&table), m_(m) {
    if (m < 2) throw std::domain_error("SplitLaw: m must be >= 2");
    if (m - 1 > table.n_max()) throw std::domain_error("SplitLaw: m exceeds harmonic table");
}

double SplitLaw::q(std::int64_t i) const {
    if (i < 1 || i >= m_) throw std::domain_error("SplitLaw::q: i out of range");
    return static_cast<double>(m_) /
           (2.0 * table_->h(m_ - 1) * static_cast<double>(i) * static_cast<double>(m_ - i));
}

std::vector<double> SplitLaw::pmf() const {
    std::vector<double> p(static_cast<std::size_t>(m_ - 1));
    for (std::int64_t i = 1; i < m_; ++i) p[static_cast<std::size_t>(i - 1)] = q(i);
    return p;
}

double beta_fn(std::int64_t t1, std::int64_t t2) {
    if (t1 < 1 || t2 < 1) throw std::domain_error("beta_fn: arguments must be >= 1");
    return std::exp(std::lgamma(static_cast<double>(t1)) + std::lgamma(static_cast<double>(t2)) -
                    std::lgamma(static_cast<double>(t1 + t2)));
}

double alpha_t(std::int64_t t, AlphaVariant variant) {
    if (t < 2) throw std::domain_error("alpha_t: t must be >= 2");
    HarmonicTable table(t);
    double denom = table.h(t - 1);
    const std::int64_t t1_min = (variant == AlphaVariant::inclusive) ? 1 : 2;
    for (std::int64_t t1 = t1_min; t1 <= t - 1; ++t1) denom -= beta_fn(t1, t - t1);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

BetaHeight beta_height_constant() {
    const ZetaConstants z = zeta_constants();
    const double log2 = std::log(2.0);
    const double c = 4.0 * z.zeta3;
    auto g = [&](double a) { return a + c * a * a / (a * log2 - 1.0); };

    // Golden-section search on a bracket well clear of the pole at 1/log2.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1.0 / log2 + 1e-9, hi = 1000.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = g(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = g(x2);
        }
    }
    const double argmin = (lo + hi) / 2.0;
    return BetaHeight{g(argmin), argmin};
}

namespace {
// Integrand after z = e^{-s}: log^r(z)/(1-z) dz = (-1)^r s^r e^{-s}/(1-e^{-s}) ds
// over s in (0, inf); the s->0 limit of s^r e^{-s}/(1-e^{-s}) is s^{r-1} -> finite.
double log_integrand(int r, double s) {
    if (s < 1e-8) {
        // series: e^{-s}/(1-e^{-s}) = 1/s - 1/2 + s/12 + O(s^3)
        return std::pow(s, r - 1) * (1.0 - s / 2.0 + s * s / 12.0);
    }
    return std::pow(s, r) * std::exp(-s) / (1.0 - std::exp(-s));
}

double adaptive_simpson(int r, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = (a + b) / 2.0;
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = log_integrand(r, lm), frm = log_integrand(r, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(r, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(r, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace

double log_integral_identity(int r) {
    if (r < 1 || r > 6) throw std::domain_error("log_integral_identity: need 1 <= r <= 6");
    // Integrate s^r e^{-s}/(1-e^{-s}) over [0, 60]; the tail beyond 60 is
    // below e^{-60} * poly and far under the 1e-8 target.
    const double a = 0.0, b = 60.0;
    const double fa = log_integrand(r, a), fb = log_integrand(r, b);
    const double m = (a + b) / 2.0, fm = log_integrand(r, m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double value = adaptive_simpson(r, a, b, fa, fm, fb, whole, 1e-12, 40);
    return (r % 2 == 0) ? value : -value;
}

}  // namespace cbs
