#include "cbs/series.hpp"

#include <cmath>
#include <stdexcept>

#include "cbs/reduction.hpp"

namespace cbs {

namespace {
void check_n_max(const HarmonicTable& table, std::int64_t n_max, std::int64_t lo = 2) {
    if (n_max < lo) throw std::domain_error("series: n_max too small");
    if (n_max - 1 > table.n_max()) throw std::domain_error("series: harmonic table too short");
}
}  // namespace

MomentSeries d_moments(const HarmonicTable& table, std::int64_t n_max,
                       const ProgressFn& progress) {
    check_n_max(table, n_max);
    MomentSeries s;
    s.n_max = n_max;
    const auto count = static_cast<std::size_t>(n_max) + 1;
    s.e_d.assign(count, 0.0);
    s.v_d.assign(count, 0.0);
    // Row n needs sum (v+e^2)[k]/(n-k) and sum e[k]/(n-k); expanding the
    // square (e_n - e_k)^2 against those running sums avoids a third pass:
    //   v_n = (S_ve2 - 2 e_n S_e)/h + e_n^2.
    std::vector<double> ve2(count, 0.0);  // v_d + e_d^2
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double hh = table.h(n - 1);
        const double s_e = row_sum_desc(s.e_d.data(), inv, un);
        const double e_n = (1.0 + s_e) / hh;
        const double s_ve2 = row_sum_desc(ve2.data(), inv, un);
        const double v_n = (s_ve2 - 2.0 * e_n * s_e) / hh + e_n * e_n;
        s.e_d[un] = e_n;
        s.v_d[un] = v_n;
        ve2[un] = v_n + e_n * e_n;
        if (progress && (n % 1024 == 0 || n == n_max)) progress(n, n_max);
    }
    return s;
}

std::vector<double> d_mean_only(const HarmonicTable& table, std::int64_t n_max,
                                const ProgressFn& progress) {
    check_n_max(table, n_max);
    std::vector<double> e(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        e[un] = (1.0 + row_sum_desc(e.data(), inv, un)) / table.h(n - 1);
        if (progress && (n % 1024 == 0 || n == n_max)) progress(n, n_max);
    }
    return e;
}

void l_moments(const HarmonicTable& table, MomentSeries& s,
               const ProgressFn& progress) {
    check_n_max(table, s.n_max);
    const auto count = static_cast<std::size_t>(s.n_max) + 1;
    s.e_l.assign(count, 0.0);
    s.v_l.assign(count, 0.0);
    std::vector<double> ve2(count, 0.0);  // v_l + e_l^2
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= s.n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double hh = table.h(n - 1);
        const double s_e = row_sum_desc(s.e_l.data(), inv, un);
        const double e_n = 1.0 + s_e / hh;
        const double s_ve2 = row_sum_desc(ve2.data(), inv, un);
        const double v_n = -1.0 + (s_ve2 - 2.0 * e_n * s_e) / hh + e_n * e_n;
        s.e_l[un] = e_n;
        s.v_l[un] = v_n;
        ve2[un] = v_n + e_n * e_n;
        if (progress && (n % 1024 == 0 || n == s.n_max)) progress(n, s.n_max);
    }
}

void pair_product(const HarmonicTable& table, MomentSeries& s,
                  const ProgressFn& progress) {
    if (s.e_d.empty() || s.v_d.empty())
        throw std::invalid_argument("pair_product: d_moments must be computed first");
    if (s.n_max > 100000)
        throw std::domain_error("pair_product: n_max capped at 1e5 (O(n^2) convolution)");
    check_n_max(table, s.n_max);
    const auto count = static_cast<std::size_t>(s.n_max) + 1;
    s.e_z.assign(count, 0.0);
    s.r.assign(count, 0.0);
    const double* inv = table.inv_data().data();
    // (i-1) e_z[i] as a running array so the together-term is a plain row sum.
    std::vector<double> iz(count, 0.0);
    for (std::int64_t n = 2; n <= s.n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double hh = table.h(n - 1);
        const double s_tog = row_sum_desc(iz.data(), inv, un);
        // Separation term: sum_{i=1}^{n-1} e_d[i] e_d[n-i], k-descending order.
        double conv = 0.0;
        for (std::size_t i = un - 1; i >= 1; --i) conv += s.e_d[i] * s.e_d[un - i];
        const double nm1 = static_cast<double>(n - 1);
        const double z_n = s_tog / (nm1 * hh) + 2.0 * s.e_d[un] / hh + conv / (nm1 * hh);
        s.e_z[un] = z_n;
        iz[un] = static_cast<double>(n - 1) * z_n;
        s.r[un] = (z_n - s.e_d[un] * s.e_d[un]) / s.v_d[un];
        if (progress && (n % 1024 == 0 || n == s.n_max)) progress(n, s.n_max);
    }
}

LaplaceSeries laplace_d(const HarmonicTable& table, std::int64_t n_max, double u) {
    if (u >= 1.0) throw std::domain_error("laplace_d: requires u < 1 (pole at h_1 = 1)");
    check_n_max(table, n_max, 1);
    LaplaceSeries out;
    out.u = u;
    out.value.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.value[1] = 1.0;
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        out.value[un] = row_sum_desc(out.value.data(), inv, un) / (table.h(n - 1) - u);
    }
    return out;
}

LaplaceSeries laplace_l(const HarmonicTable& table, std::int64_t n_max, double u) {
    if (std::fabs(u) > 5.0)
        throw std::domain_error("laplace_l: |u| <= 5 supported (double-range guard)");
    check_n_max(table, n_max, 1);
    LaplaceSeries out;
    out.u = u;
    out.value.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.value[1] = 1.0;
    const double eu = std::exp(u);
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        out.value[un] = eu * (row_sum_desc(out.value.data(), inv, un) / table.h(n - 1));
    }
    return out;
}

namespace {
/// (n-1)_(t-1) = (n-1)(n-2)...(n-t+1); exact product for t < 8, log-gamma
/// above (overflow guard at large n and t).
double falling_factorial(std::int64_t n, std::int64_t r) {
    if (r < 0 || n < r) return 0.0;
    if (r == 0) return 1.0;
    if (r < 8) {
        double p = 1.0;
        for (std::int64_t i = 0; i < r; ++i) p *= static_cast<double>(n - i);
        return p;
    }
    return std::exp(std::lgamma(static_cast<double>(n + 1)) -
                    std::lgamma(static_cast<double>(n - r + 1)));
}

std::int64_t binom_small(std::int64_t t, std::int64_t k) {
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (t - k + i) / i;
    return r;
}

void check_pruned_args(std::int64_t n_max, std::int64_t t, std::int64_t t_cap,
                       std::int64_t n_cap) {
    if (t < 2) throw std::domain_error("pruned: t must be >= 2");
    if (t > t_cap) throw std::domain_error("pruned: t above supported cap");
    if (n_max > n_cap) throw std::domain_error("pruned: n_max above supported cap");
}
}  // namespace

PrunedTable branch_split_expectation(const HarmonicTable& table, std::int64_t n_max,
                                     std::int64_t t, const ProgressFn& progress) {
    check_pruned_args(n_max, t, 12, 100000);
    check_n_max(table, n_max);
    PrunedTable out;
    out.t = t;
    const auto count = static_cast<std::size_t>(n_max) + 1;
    out.e_s.assign(count, 0.0);
    std::vector<double> phi(count, 0.0);  // Phi_n = (n-1)_(t-1) E[S_{n,t}]
    const double* inv = table.inv_data().data();
    for (std::int64_t n = t; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double ff = falling_factorial(n - 1, t - 1);
        phi[un] = ff + row_sum_desc(phi.data(), inv, un) / table.h(n - 1);
        out.e_s[un] = phi[un] / ff;
        if (progress && (n % 1024 == 0 || n == n_max)) progress(n, n_max);
    }
    return out;
}

namespace {
/// Shared Psi sweep computing all levels tau = 2..t jointly; returns the
/// scaled expectations e_sstar[tau][n] = Psi_{n,tau}/(n-1)_(tau-1) for every
/// level. Each level's cross term needs sum_k (n-k)_{t2}/(n-k) * Psi_{k,t1};
/// the (n-k)-indexed factor is regenerated per row in the same k-descending
/// order as every other sweep.
std::vector<std::vector<double>> psi_levels(const HarmonicTable& table, std::int64_t n_max,
                                            std::int64_t t, PrunedLengthForm form,
                                            const ProgressFn& progress) {
    const auto count = static_cast<std::size_t>(n_max) + 1;
    std::vector<std::vector<double>> psi(static_cast<std::size_t>(t) + 1,
                                         std::vector<double>(count, 0.0));
    std::vector<std::vector<double>> scaled(static_cast<std::size_t>(t) + 1);
    for (std::int64_t tau = 2; tau <= t; ++tau)
        scaled[static_cast<std::size_t>(tau)].assign(count, 0.0);
    const double* inv = table.inv_data().data();
    for (std::int64_t n = 2; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        const double hh = table.h(n - 1);
        for (std::int64_t tau = 2; tau <= t && tau <= n; ++tau) {
            double acc = 0.0;
            for (std::int64_t t1 = 2; t1 <= tau; ++t1) {
                const std::int64_t t2 = tau - t1;
                const double* row = psi[static_cast<std::size_t>(t1)].data();
                double term;
                if (t2 == 0) {
                    term = row_sum_desc(row, inv, un);
                } else {
                    term = 0.0;
                    for (std::size_t k = un - 1; k >= 1; --k) {
                        const std::int64_t gap = n - static_cast<std::int64_t>(k);
                        term += row[k] * (falling_factorial(gap, t2) *
                                          inv[static_cast<std::size_t>(gap)]);
                    }
                }
                if (form == PrunedLengthForm::corrected)
                    term *= static_cast<double>(binom_small(tau, t1));
                acc += term;
            }
            const double ff = falling_factorial(n - 1, tau - 1);
            const double value = ff + acc / hh;
            psi[static_cast<std::size_t>(tau)][un] = value;
            scaled[static_cast<std::size_t>(tau)][un] = value / ff;
        }
        if (progress && (n % 1024 == 0 || n == n_max)) progress(n, n_max);
    }
    return scaled;
}
}  // namespace

std::vector<std::vector<double>> pruned_length_levels(const HarmonicTable& table,
                                                      std::int64_t n_max, std::int64_t t_max,
                                                      PrunedLengthForm form,
                                                      const ProgressFn& progress) {
    check_pruned_args(n_max, t_max, 8, 30000);
    check_n_max(table, n_max);
    return psi_levels(table, n_max, t_max, form, progress);
}

PrunedTable pruned_length_expectation(const HarmonicTable& table, std::int64_t n_max,
                                      std::int64_t t, PrunedLengthForm form) {
    PrunedTable out;
    out.t = t;
    out.e_sstar = pruned_length_levels(table, n_max, t, form)[static_cast<std::size_t>(t)];
    return out;
}

PrunedTable pruned_table(const HarmonicTable& table, std::int64_t n_max, std::int64_t t,
                         PrunedLengthForm form) {
    check_pruned_args(n_max, t, 8, 30000);
    PrunedTable out = branch_split_expectation(table, n_max, t);
    out.e_sstar = pruned_length_levels(table, n_max, t, form)[static_cast<std::size_t>(t)];
    return out;
}

SubtreeTable subtree_distribution(const HarmonicTable& table, std::int64_t n_max,
                                  std::int64_t t_max) {
    if (t_max < 1 || t_max > n_max) throw std::domain_error("subtree: need 1 <= t_max <= n_max");
    check_n_max(table, n_max, 1);
    SubtreeTable out;
    out.n_max = n_max;
    out.t_max = t_max;
    const auto w = static_cast<std::size_t>(t_max) + 1;
    out.xi.assign((static_cast<std::size_t>(n_max) + 1) * w, 0.0);
    out.eta.assign(out.xi.size(), 0.0);
    out.u_dist.assign(out.xi.size(), 0.0);
    const double* inv = table.inv_data().data();
    // Column-by-column: each t evolves independently in n.
    std::vector<double> col(static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t t = 1; t <= t_max; ++t) {
        // xi column
        std::fill(col.begin(), col.end(), 0.0);
        col[static_cast<std::size_t>(t)] = 1.0 / static_cast<double>(t);
        for (std::int64_t n = t + 1; n <= n_max; ++n) {
            const auto un = static_cast<std::size_t>(n);
            col[un] = row_sum_desc(col.data(), inv, un) / table.h(n - 1);
        }
        for (std::int64_t n = t; n <= n_max; ++n)
            out.xi[static_cast<std::size_t>(n) * w + static_cast<std::size_t>(t)] =
                col[static_cast<std::size_t>(n)];
        // eta column: same kernel plus the 1/n root term each row.
        std::fill(col.begin(), col.end(), 0.0);
        col[static_cast<std::size_t>(t)] = 1.0 / static_cast<double>(t);
        for (std::int64_t n = t + 1; n <= n_max; ++n) {
            const auto un = static_cast<std::size_t>(n);
            col[un] = inv[un] + row_sum_desc(col.data(), inv, un) / table.h(n - 1);
        }
        for (std::int64_t n = t; n <= n_max; ++n)
            out.eta[static_cast<std::size_t>(n) * w + static_cast<std::size_t>(t)] =
                col[static_cast<std::size_t>(n)];
    }
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double norm = 2.0 - 1.0 / static_cast<double>(n);
        for (std::int64_t t = 1; t <= t_max && t <= n; ++t) {
            const auto idx = static_cast<std::size_t>(n) * w + static_cast<std::size_t>(t);
            out.u_dist[idx] = out.xi[idx] / norm;
        }
    }
    return out;
}

std::vector<double> subtree_pgf(const HarmonicTable& table, std::int64_t n_max, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("subtree_pgf: need 0 < q < 1");
    check_n_max(table, n_max, 1);
    // Truncation: smallest t_cut with q^t/(t h_t) < 1e-16 (xi <= 1/(t h_t)
    // off the diagonal; the diagonal term itself is below q^t / t).
    std::int64_t t_cut = 1;
    {
        double qp = q;
        double ht = 1.0;  // h_1
        while (t_cut < n_max) {
            if (qp / (static_cast<double>(t_cut) * ht) < 1e-16) break;
            ++t_cut;
            qp *= q;
            ht += 1.0 / static_cast<double>(t_cut);
        }
    }
    SubtreeTable tab = subtree_distribution(table, n_max, std::min(t_cut, n_max));
    std::vector<double> F(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        double acc = 0.0;
        double qp = 1.0;
        for (std::int64_t t = 1; t <= tab.t_max && t <= n; ++t) {
            qp *= q;
            acc += qp * tab.xi_at(n, t);
        }
        F[static_cast<std::size_t>(n)] = acc;
    }
    return F;
}

double logratio_sum(std::int64_t n) {
    if (n < 2) throw std::domain_error("logratio_sum: n >= 2");
    const double dn = static_cast<double>(n);
    return block_pairwise_sum(static_cast<std::size_t>(n) - 1, [dn, n](std::size_t i) {
        const double k = static_cast<double>(i + 1);
        return std::log(k / dn) / static_cast<double>(n - static_cast<std::int64_t>(i) - 1);
    });
}

double logratio_sq_sum(std::int64_t n) {
    if (n < 2) throw std::domain_error("logratio_sq_sum: n >= 2");
    const double dn = static_cast<double>(n);
    return block_pairwise_sum(static_cast<std::size_t>(n) - 1, [dn, n](std::size_t i) {
        const double k = static_cast<double>(i + 1);
        const double lg = std::log(k / dn);
        return lg * lg / static_cast<double>(n - static_cast<std::int64_t>(i) - 1);
    });
}

double logratio_remainder(std::int64_t n) {
    const ZetaConstants z = zeta_constants();
    const double dn = static_cast<double>(n);
    const double two_pi_e = 2.0 * 3.14159265358979323846 * std::exp(1.0);
    return -z.zeta2 + std::log(two_pi_e * dn) / (2.0 * dn) +
           std::log(dn) / (12.0 * dn * dn);
}

}  // namespace cbs
