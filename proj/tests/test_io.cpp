#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "cbs/constants.hpp"
#include "cbs/estimator.hpp"
#include "cbs/io.hpp"
#include "cbs/series.hpp"

using namespace cbs;

namespace {
const HarmonicTable& table100() {
    static HarmonicTable t(100);
    return t;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string field;
    while (std::getline(is, field, ',')) out.push_back(field);
    return out;
}
}  // namespace

TEST_CASE("fmt_g17 round-trips every finite double exactly") {
    const double cases[] = {0.0,      1.0 / 3.0, 0.1,       3.141592653589793,
                            1e300,    1e-300,    -2.5e-10,  -123456.789,
                            0x1p-52,  2.0,       6.02e23,   -0.0};
    for (double x : cases) {
        const std::string s = fmt_g17(x);
        char* end = nullptr;
        const double back = std::strtod(s.c_str(), &end);
        CHECK(*end == '\0');
        CHECK(back == x);
    }
    CHECK(fmt_g17(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(fmt_g17(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(fmt_g17(1.0) == "1");
}

TEST_CASE("moments CSV: schema line, row range, and exact round-trip") {
    MomentSeries s = d_moments(table100(), 4);
    l_moments(table100(), s);
    pair_product(table100(), s);
    std::ostringstream os;
    write_moments_csv(os, s);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 5);  // schema + header + n = 2..4
    CHECK(lines[0] == "# schema: moments-v1");
    CHECK(lines[1] == "n,e_d,var_d,e_l,var_l,e_z,r");
    const auto row2 = split_csv(lines[2]);
    REQUIRE(row2.size() == 7);
    CHECK(row2[0] == "2");
    CHECK(std::strtod(row2[1].c_str(), nullptr) == s.e_d[2]);
    CHECK(std::strtod(row2[5].c_str(), nullptr) == s.e_z[2]);
    // Without the pair sweep the e_z and r columns read "nan".
    MomentSeries bare = d_moments(table100(), 4);
    l_moments(table100(), bare);
    std::ostringstream os2;
    write_moments_csv(os2, bare);
    const auto row2b = split_csv(lines_of(os2.str())[2]);
    CHECK(row2b[5] == "nan");
    CHECK(row2b[6] == "nan");
}

TEST_CASE("pruned, subtree, laplace, pgf, lognk CSV shapes") {
    const PrunedTable pt = pruned_table(table100(), 6, 3);
    std::ostringstream os;
    write_pruned_csv(os, pt, 6);
    auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 6);  // schema + header + n = 3..6
    CHECK(lines[0] == "# schema: pruned-v1");
    CHECK(lines[1] == "n,t,e_s,e_sstar");
    for (std::size_t i = 2; i < lines.size(); ++i) CHECK(split_csv(lines[i])[1] == "3");

    const SubtreeTable st = subtree_distribution(table100(), 5, 5);
    std::ostringstream os2;
    write_subtree_csv(os2, st);
    lines = lines_of(os2.str());
    CHECK(lines.size() == 2 + 15);  // triangle: 1+2+3+4+5 rows
    CHECK(lines[0] == "# schema: subtree-v1");

    const LaplaceSeries ls = laplace_d(table100(), 4, 0.25);
    std::ostringstream os3;
    write_laplace_csv(os3, ls, "phi_d");
    lines = lines_of(os3.str());
    REQUIRE(lines.size() == 6);  // schema + header + n = 1..4
    CHECK(lines[0] == "# schema: laplace-v1");
    CHECK(split_csv(lines[2])[1] == "phi_d");
    CHECK(split_csv(lines[2])[3] == "1");  // phi_1(u) = 1 for every u

    const auto pgf = subtree_pgf(table100(), 3, 0.5);
    std::ostringstream os4;
    write_subtree_pgf_csv(os4, 0.5, pgf);
    lines = lines_of(os4.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "# schema: subtree-pgf-v1");
    CHECK(split_csv(lines[2])[1] == "0.5");

    std::vector<LognkRow> rows(2);
    rows[0] = {10, logratio_sum(10), logratio_sq_sum(10), 0.0};
    rows[1] = {20, logratio_sum(20), logratio_sq_sum(20), 0.0};
    std::ostringstream os5;
    write_lognk_csv(os5, rows);
    lines = lines_of(os5.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "# schema: lognk-v1");
    CHECK(lines[1] == "n,sum1,sum2,residual_n2");
}

TEST_CASE("JSON table mirrors match the CSV content and null semantics") {
    MomentSeries bare = d_moments(table100(), 4);
    const auto j = nlohmann::json::parse(table_json_moments(bare));
    CHECK(j["schema"] == "moments-v1");
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0]["n"] == 2);
    CHECK(j["rows"][0]["e_d"].get<double>() == bare.e_d[2]);
    CHECK(j["rows"][0]["e_l"].is_null());  // l sweep not run -> null, not nan
    CHECK(j["rows"][0]["r"].is_null());

    const SubtreeTable st = subtree_distribution(table100(), 5, 5);
    const auto js = nlohmann::json::parse(table_json_subtree(st));
    CHECK(js["schema"] == "subtree-v1");
    CHECK(js["rows"].size() == 15);
    CHECK(js["rows"][0]["xi"].get<double>() == 1.0);  // n = 1, t = 1

    const PrunedTable pt = pruned_table(table100(), 6, 3);
    const auto jp = nlohmann::json::parse(table_json_pruned(pt, 6));
    CHECK(jp["schema"] == "pruned-v1");
    CHECK(jp["rows"].size() == 4);
    CHECK(jp["rows"][0]["t"] == 3);
}

TEST_CASE("mc report JSON: fields, z-score, and byte determinism") {
    Estimate est(std::vector<double>{2.0});
    for (double x : {1.0, 2.0, 3.0, 4.0}) est.add(x);
    McReport rep;
    rep.statistic = "leaf_D";
    rep.n = 10;
    rep.params = {{"t", 3}};
    rep.seed = 42;
    rep.estimate = &est;
    rep.exact_ref = 2.0;
    const std::string a = mc_report_json(rep);
    const std::string b = mc_report_json(rep);
    CHECK(a == b);  // identical input -> byte-identical output
    const auto j = nlohmann::json::parse(a);
    CHECK(j["statistic"] == "leaf_D");
    CHECK(j["n"] == 10);
    CHECK(j["params"]["t"] == 3);
    CHECK(j["n_samples"] == 4);
    CHECK(j["seed"] == 42);
    CHECK(j["moments"]["mean"].get<double>() == est.mean());
    CHECK(j["moments"]["variance"].get<double>() == est.variance());
    REQUIRE(j["tails"].size() == 1);
    CHECK(j["tails"][0]["threshold"] == 2.0);
    CHECK(j["tails"][0]["count"] == 3);
    CHECK(j["tails"][0]["ci95"].size() == 2);
    CHECK(j["exact_ref"] == 2.0);
    const double z = (est.mean() - 2.0) / est.std_err_mean();
    CHECK(j["z_score"].get<double>() == doctest::Approx(z).epsilon(1e-15));
    // Without exact_ref neither derived field appears.
    rep.exact_ref.reset();
    const auto j2 = nlohmann::json::parse(mc_report_json(rep));
    CHECK(!j2.contains("exact_ref"));
    CHECK(!j2.contains("z_score"));
}

TEST_CASE("tree report JSON: heights, tails, census, violations") {
    const TailReport tails = tail_report(table100(), 50, 300, 9, 1, {1e9}, {0.5});
    Estimate census(std::vector<double>{});
    for (int i = 0; i < 300; ++i) census.add(1.0);
    TreeReport rep;
    rep.n = 50;
    rep.seed = 9;
    rep.tails = &tails;
    rep.census_t = {1};
    rep.census = {&census};
    rep.census_exact = {1.0};
    rep.violations = 0;
    const auto j = nlohmann::json::parse(tree_report_json(rep));
    CHECK(j["statistic"] == "tree");
    CHECK(j["n"] == 50);
    CHECK(j["n_samples"] == 300);
    CHECK(j["moments"].contains("max_d"));
    CHECK(j["moments"].contains("max_l"));
    CHECK(j["tails"]["max_d"][0]["count"] == 0);
    CHECK(j["tails"]["max_l"][0]["count"] == 300);
    CHECK(j["ratio_d_over_log_n"].get<double>() > 0.0);
    REQUIRE(j["census"].size() == 1);
    CHECK(j["census"][0]["t"] == 1);
    CHECK(j["census"][0]["exact_ref"] == 1.0);
    CHECK(j["violations"] == 0);
}
