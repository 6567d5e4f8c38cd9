#pragma once
// Serialization: CSV tables (schema-stamped, 17-significant-digit floats)
// and the Monte Carlo JSON report. All writers are deterministic: identical
// inputs produce byte-identical output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbs/estimator.hpp"
#include "cbs/series.hpp"

namespace cbs {

/// Shortest exact decimal form a double always round-trips from (%.17g).
std::string fmt_g17(double x);

// Each CSV starts with "# schema: <name>" followed by the column header.
// Schema names are versioned; a change in columns bumps the suffix.

/// moments-v1: n,e_d,var_d,e_l,var_l,e_z,r  (rows n = 2..n_max; e_z/r are
/// "nan" when the pair-product sweep was not run).
void write_moments_csv(std::ostream& os, const MomentSeries& s);

/// pruned-v1: n,t,e_s,e_sstar  (rows n = t..n_max; either column is "nan"
/// when that statistic was not computed).
void write_pruned_csv(std::ostream& os, const PrunedTable& table, std::int64_t n_max);

/// subtree-v1: n,t,xi,eta,u  (rows n = 1..n_max, t = 1..min(n, t_max)).
void write_subtree_csv(std::ostream& os, const SubtreeTable& table);

/// lognk-v1: n,sum1,sum2,residual_n2.
struct LognkRow {
    std::int64_t n = 0;
    double sum1 = 0.0;         ///< sum_{k<n} log(k/n)/(n-k)
    double sum2 = 0.0;         ///< sum_{k<n} log^2(k/n)/(n-k)
    double residual_n2 = 0.0;  ///< (sum1 - asymptotic remainder) * n^2
};
void write_lognk_csv(std::ostream& os, const std::vector<LognkRow>& rows);

/// laplace-v1: n,transform,u,value  (transform is "phi_d" or "f_l").
void write_laplace_csv(std::ostream& os, const LaplaceSeries& s, const std::string& transform);

/// subtree-pgf-v1: n,q,F  (F = sum_t q^t xi_n(t), rows n = 1..).
void write_subtree_pgf_csv(std::ostream& os, double q, const std::vector<double>& value);

// JSON mirrors of the CSV tables: {"schema": <name>, "rows": [{col: val}]}.
// Column names, row ranges, and "absent" semantics (null instead of "nan")
// match the CSV writers; floats use the shortest decimal that round-trips.
std::string table_json_moments(const MomentSeries& s);
std::string table_json_pruned(const PrunedTable& table, std::int64_t n_max);
std::string table_json_subtree(const SubtreeTable& table);
std::string table_json_lognk(const std::vector<LognkRow>& rows);
std::string table_json_laplace(const LaplaceSeries& s, const std::string& transform);
std::string table_json_subtree_pgf(double q, const std::vector<double>& value);

/// Monte Carlo report serialized as indented JSON. `params` entries are
/// extra key/value pairs (e.g. {"t","3"}; values parse as integers when
/// possible). exact_ref adds a z_score = (mean - exact_ref)/std_err_mean.
struct McReport {
    std::string statistic;
    std::int64_t n = 0;
    std::vector<std::pair<std::string, std::int64_t>> params;
    std::uint64_t seed = 0;
    const Estimate* estimate = nullptr;
    std::optional<double> exact_ref;
};
std::string mc_report_json(const McReport& report);

/// Combined whole-tree report: height maxima with tail entries, optional
/// subtree census means (with exact references), structure violations.
struct TreeReport {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    const TailReport* tails = nullptr;
    std::vector<std::int64_t> census_t;
    std::vector<const Estimate*> census;
    std::vector<std::optional<double>> census_exact;
    std::int64_t violations = 0;
};
std::string tree_report_json(const TreeReport& report);

}  // namespace cbs
