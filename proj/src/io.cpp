#include "cbs/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace cbs {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {
constexpr const char* kNan = "nan";

std::string opt_g17(const std::vector<double>& v, std::size_t i) {
    return (i < v.size()) ? fmt_g17(v[i]) : kNan;
}

nlohmann::ordered_json opt_json(const std::vector<double>& v, std::size_t i) {
    if (i < v.size()) return v[i];
    return nullptr;
}

std::string dump_table(const char* schema, nlohmann::ordered_json rows) {
    nlohmann::ordered_json j;
    j["schema"] = schema;
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

nlohmann::ordered_json moments_json(const Estimate& est) {
    nlohmann::ordered_json m;
    m["mean"] = est.mean();
    m["variance"] = est.variance();
    m["std_err_mean"] = est.std_err_mean();
    m["skewness"] = est.skewness();
    m["excess_kurtosis"] = est.excess_kurtosis();
    m["min"] = est.min();
    m["max"] = est.max();
    return m;
}

nlohmann::ordered_json tails_json(const Estimate& est) {
    nlohmann::ordered_json tails = nlohmann::ordered_json::array();
    const auto n = est.count();
    for (std::size_t i = 0; i < est.thresholds().size(); ++i) {
        const auto k = est.tail_counts()[i];
        const BinomialCi ci = binomial_ci(k, n, 0.95);
        nlohmann::ordered_json entry;
        entry["threshold"] = est.thresholds()[i];
        entry["count"] = k;
        entry["freq"] = n > 0 ? static_cast<double>(k) / static_cast<double>(n) : 0.0;
        entry["ci95"] = {ci.lo, ci.hi};
        tails.push_back(entry);
    }
    return tails;
}
}  // namespace

void write_moments_csv(std::ostream& os, const MomentSeries& s) {
    os << "# schema: moments-v1\n";
    os << "n,e_d,var_d,e_l,var_l,e_z,r\n";
    for (std::int64_t n = 2; n <= s.n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        os << n << ',' << fmt_g17(s.e_d[un]) << ',' << fmt_g17(s.v_d[un]) << ','
           << opt_g17(s.e_l, un) << ',' << opt_g17(s.v_l, un) << ',' << opt_g17(s.e_z, un)
           << ',' << opt_g17(s.r, un) << '\n';
    }
}

void write_pruned_csv(std::ostream& os, const PrunedTable& table, std::int64_t n_max) {
    os << "# schema: pruned-v1\n";
    os << "n,t,e_s,e_sstar\n";
    for (std::int64_t n = table.t; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        os << n << ',' << table.t << ',' << opt_g17(table.e_s, un) << ','
           << opt_g17(table.e_sstar, un) << '\n';
    }
}

void write_subtree_csv(std::ostream& os, const SubtreeTable& table) {
    os << "# schema: subtree-v1\n";
    os << "n,t,xi,eta,u\n";
    for (std::int64_t n = 1; n <= table.n_max; ++n)
        for (std::int64_t t = 1; t <= table.t_max && t <= n; ++t)
            os << n << ',' << t << ',' << fmt_g17(table.xi_at(n, t)) << ','
               << fmt_g17(table.eta_at(n, t)) << ',' << fmt_g17(table.u_at(n, t)) << '\n';
}

void write_lognk_csv(std::ostream& os, const std::vector<LognkRow>& rows) {
    os << "# schema: lognk-v1\n";
    os << "n,sum1,sum2,residual_n2\n";
    for (const auto& r : rows)
        os << r.n << ',' << fmt_g17(r.sum1) << ',' << fmt_g17(r.sum2) << ','
           << fmt_g17(r.residual_n2) << '\n';
}

void write_laplace_csv(std::ostream& os, const LaplaceSeries& s, const std::string& transform) {
    os << "# schema: laplace-v1\n";
    os << "n,transform,u,value\n";
    for (std::size_t n = 1; n < s.value.size(); ++n)
        os << n << ',' << transform << ',' << fmt_g17(s.u) << ',' << fmt_g17(s.value[n])
           << '\n';
}

void write_subtree_pgf_csv(std::ostream& os, double q, const std::vector<double>& value) {
    os << "# schema: subtree-pgf-v1\n";
    os << "n,q,F\n";
    for (std::size_t n = 1; n < value.size(); ++n)
        os << n << ',' << fmt_g17(q) << ',' << fmt_g17(value[n]) << '\n';
}

std::string table_json_moments(const MomentSeries& s) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::int64_t n = 2; n <= s.n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        rows.push_back({{"n", n},
                        {"e_d", s.e_d[un]},
                        {"var_d", s.v_d[un]},
                        {"e_l", opt_json(s.e_l, un)},
                        {"var_l", opt_json(s.v_l, un)},
                        {"e_z", opt_json(s.e_z, un)},
                        {"r", opt_json(s.r, un)}});
    }
    return dump_table("moments-v1", std::move(rows));
}

std::string table_json_pruned(const PrunedTable& table, std::int64_t n_max) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::int64_t n = table.t; n <= n_max; ++n) {
        const auto un = static_cast<std::size_t>(n);
        rows.push_back({{"n", n},
                        {"t", table.t},
                        {"e_s", opt_json(table.e_s, un)},
                        {"e_sstar", opt_json(table.e_sstar, un)}});
    }
    return dump_table("pruned-v1", std::move(rows));
}

std::string table_json_subtree(const SubtreeTable& table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::int64_t n = 1; n <= table.n_max; ++n)
        for (std::int64_t t = 1; t <= table.t_max && t <= n; ++t)
            rows.push_back({{"n", n},
                            {"t", t},
                            {"xi", table.xi_at(n, t)},
                            {"eta", table.eta_at(n, t)},
                            {"u", table.u_at(n, t)}});
    return dump_table("subtree-v1", std::move(rows));
}

std::string table_json_lognk(const std::vector<LognkRow>& rows_in) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_in)
        rows.push_back(
            {{"n", r.n}, {"sum1", r.sum1}, {"sum2", r.sum2}, {"residual_n2", r.residual_n2}});
    return dump_table("lognk-v1", std::move(rows));
}

std::string table_json_laplace(const LaplaceSeries& s, const std::string& transform) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t n = 1; n < s.value.size(); ++n)
        rows.push_back(
            {{"n", n}, {"transform", transform}, {"u", s.u}, {"value", s.value[n]}});
    return dump_table("laplace-v1", std::move(rows));
}

std::string table_json_subtree_pgf(double q, const std::vector<double>& value) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t n = 1; n < value.size(); ++n)
        rows.push_back({{"n", n}, {"q", q}, {"F", value[n]}});
    return dump_table("subtree-pgf-v1", std::move(rows));
}

std::string mc_report_json(const McReport& report) {
    const Estimate& est = *report.estimate;
    nlohmann::ordered_json j;
    j["statistic"] = report.statistic;
    j["n"] = report.n;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.params) j["params"][key] = value;
    j["n_samples"] = est.count();
    j["seed"] = report.seed;
    j["moments"] = moments_json(est);
    j["tails"] = tails_json(est);
    if (report.exact_ref) {
        j["exact_ref"] = *report.exact_ref;
        const double se = est.std_err_mean();
        j["z_score"] = se > 0.0 ? (est.mean() - *report.exact_ref) / se
                                : std::numeric_limits<double>::quiet_NaN();
    }
    return j.dump(2) + "\n";
}

std::string tree_report_json(const TreeReport& report) {
    const TailReport& tr = *report.tails;
    nlohmann::ordered_json j;
    j["statistic"] = "tree";
    j["n"] = report.n;
    j["params"] = nlohmann::ordered_json::object();
    j["n_samples"] = tr.samples;
    j["seed"] = report.seed;
    j["moments"]["max_d"] = moments_json(tr.max_d);
    j["moments"]["max_l"] = moments_json(tr.max_l);
    j["tails"]["max_d"] = tails_json(tr.max_d);
    j["tails"]["max_l"] = tails_json(tr.max_l);
    j["ratio_d_over_log_n"] = tr.ratio_d;
    j["ratio_l_over_log2_n"] = tr.ratio_l;
    if (!report.census_t.empty()) {
        nlohmann::ordered_json census = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < report.census_t.size(); ++i) {
            nlohmann::ordered_json entry;
            entry["t"] = report.census_t[i];
            entry["moments"] = moments_json(*report.census[i]);
            if (report.census_exact[i]) {
                entry["exact_ref"] = *report.census_exact[i];
                const double se = report.census[i]->std_err_mean();
                entry["z_score"] = se > 0.0
                                       ? (report.census[i]->mean() - *report.census_exact[i]) / se
                                       : std::numeric_limits<double>::quiet_NaN();
            }
            census.push_back(entry);
        }
        j["census"] = census;
    }
    j["violations"] = report.violations;
    return j.dump(2) + "\n";
}

}  // namespace cbs
