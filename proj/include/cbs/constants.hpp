#pragma once
// Closed-form constants, harmonic numbers, the split law, Beta-function
// helpers, and the derived constants alpha(t) and beta used throughout the
// critical beta-splitting laboratory.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cbs {

/// Zeta values and Euler's gamma, fixed to double precision.
struct ZetaConstants {
    double zeta2;        ///< pi^2/6
    double zeta3;        ///< Apery's constant
    double zeta4;        ///< pi^4/90
    double euler_gamma;  ///< Euler-Mascheroni constant
};

/// The shared constant set (header-only values, no computation).
ZetaConstants zeta_constants();

/// Cumulative harmonic numbers h[0..n_max], h[k] = 1 + 1/2 + ... + 1/k.
///
/// Built once by forward accumulation (h[k] = h[k-1] + 1/k, in that exact
/// order); every recurrence divides by these values, and the engine's inner
/// sums deliberately reproduce the same addition order so that u = 0
/// transform normalization is bit-exact (see reduction.hpp).
class HarmonicTable {
public:
    explicit HarmonicTable(std::int64_t n_max);

    double h(std::int64_t k) const { return h_[static_cast<std::size_t>(k)]; }
    /// 1/k as stored; identical bits to the increments used to build h.
    double inv(std::int64_t k) const { return inv_[static_cast<std::size_t>(k)]; }
    std::int64_t n_max() const { return static_cast<std::int64_t>(h_.size()) - 1; }

    const std::vector<double>& h_data() const { return h_; }
    const std::vector<double>& inv_data() const { return inv_; }

private:
    std::vector<double> h_;
    std::vector<double> inv_;
};

/// Split law of a block of m >= 2 leaves: q(m,i) = m / (2 h_{m-1} i (m-i)).
class SplitLaw {
public:
    SplitLaw(const HarmonicTable& table, std::int64_t m);

    std::int64_t m() const { return m_; }
    double q(std::int64_t i) const;
    /// Full pmf, entry i-1 = q(m,i); sums to 1 within 1e-12.
    std::vector<double> pmf() const;

private:
    const HarmonicTable* table_;
    std::int64_t m_;
};

/// B(t1,t2) = (t1-1)! (t2-1)! / (t1+t2-1)!, via lgamma for stability.
double beta_fn(std::int64_t t1, std::int64_t t2);

/// Summation-range variants for alpha(t); the two readings disagree and are
/// both exposed so the exact recursion slope can arbitrate (fit.hpp).
enum class AlphaVariant {
    inclusive,   ///< sum B(t1,t2) over t1 = 1..t-1 (t2 = t-t1)
    restricted,  ///< sum over t1 = 2..t-1 only
};

/// alpha(t) = 1 / (h_{t-1} - sum B(t1,t2)) for the chosen range.
/// Returns +infinity when the denominator is <= 0 (a signaled value, not an
/// error: the t = 2 inclusive case hits h_1 - B(1,1) = 0 by design).
double alpha_t(std::int64_t t, AlphaVariant variant);

/// Height growth constant: minimizes g(a) = a + 4 a^2 zeta(3)/(a log2 - 1)
/// over a > 1/log2. Returns (min value beta, argmin).
struct BetaHeight {
    double beta;
    double argmin_alpha;
};
BetaHeight beta_height_constant();

/// Numerically evaluates I(r) = integral_0^1 log^r(z)/(1-z) dz, which equals
/// (-1)^r r! zeta(r+1). Substitutes z = e^{-s} to remove the endpoint
/// singularity, then integrates adaptively; accurate to 1e-8. 1 <= r <= 6.
double log_integral_identity(int r);

// ---------------------------------------------------------------------------
// Fitted finite-size constants (reproducible from the exact series; each is
// re-derived at acceptance time by fit_corrections() and these pinned copies
// exist so samplers/reports can standardize without recomputing the series).
// Fit window [1e4, 1e5], 64 log-spaced points, fixed leading coefficients.
// ---------------------------------------------------------------------------

/// Intercept of E[D_n] - log(n)/zeta(2); the ansatz constant c0.
inline constexpr double kC0Reference = 0.7951556604;
/// Coefficient of 1/n in the same expansion (= -3/pi^2 to 4 digits).
inline constexpr double kC1Reference = -0.304488;
/// Intercept of var(D_n) - (2 zeta3/zeta2^3) log n.
inline constexpr double kVarDIntercept = 0.93382;
/// Intercept of E[L_n] - log^2 n/(2 zeta2) - ((g z2 + z3)/z2^2) log n.
inline constexpr double kMeanLIntercept = 0.78234;
/// var(L_n) - (2 zeta3/(3 zeta2^3)) log^3 n = a0 + a1 log n + a2 log^2 n.
inline constexpr double kVarLResidual[3] = {1.71872855, -0.49054142, 0.06497659};

}  // namespace cbs
