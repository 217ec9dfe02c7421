#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddslab/residues.hpp"
#include "ddslab/xcli.hpp"

using namespace ddslab;
using namespace ddslab::xcli;

namespace {

const SymbolContext& qctx() {
    static SymbolContext c = quadchar::build_context(ringarith::BaseField::rational());
    return c;
}

struct Cli {
    int code = 0;
    std::string out, err;
};

Cli cli(std::vector<std::string> args) {
    args.insert(args.begin(), "xcli");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    Cli r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

bool single_error_line(const std::string& s) {
    return s.rfind("error E_", 0) == 0 && s.find('\n') == s.size() - 1;
}

bool is_squarefree_trial(u64 n) {
    for (u64 p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("config parse, echo round trip") {
    auto c = ExperimentConfig::parse(
        "# comment\nx_ladder = 100, 250.5\nY_ladder = 1e3, 2000\nclass = 2\ny_max = 6\ntol.nonzero = 1e-4\n"
        "workers = 3  # trailing\n");
    CHECK(c.x_ladder == std::vector<double>{100, 250.5});
    CHECK(c.Y_ladder == std::vector<u64>{1000, 2000});
    CHECK(c.cls == 2);
    CHECK(c.workers == 3);
    CHECK(c.tolerance("nonzero", 1) == 1e-4);
    CHECK(c.tolerance("other", 0.5) == 0.5);
    const auto e1 = c.echo();
    const auto e2 = ExperimentConfig::parse(e1).echo();
    CHECK(e1 == e2);
    CHECK(ExperimentConfig::parse(ExperimentConfig{}.echo()).echo() == ExperimentConfig{}.echo());
    CHECK(ExperimentConfig::parse("class = all\n").cls == -1);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(ExperimentConfig::parse("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("y_max = five\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("seed = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/ddslab.cfg"), IoError);
    auto bad = [](const std::string& text) { CHECK_THROWS_AS(ExperimentConfig::parse(text).validate(), ConfigError); };
    bad("field = Q(sqrt5)\n");
    bad("precision_bits = 128\n");
    bad("S = 2, 3\n");
    bad("workers = 0\n");
    bad("format = xml\n");
    bad("class = 4\n");
    bad("r_min = 1\n");
    CHECK_THROWS(ExperimentConfig::parse("coeff_cache = /nonexistent/x.cache\n").validate());
    CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("result table") {
    ResultTable t("demo", {"a", "b"});
    t.add_row({1, 0.1});
    t.add_row({2, NAN});
    CHECK_THROWS_AS(t.add_row({1}), StructuralError);
    CHECK_THROWS_AS(t.at(0, "c"), StructuralError);
    CHECK(t.at(1, "a") == 2);
    CHECK(t.column("b")[0] == 0.1);
    t.add_meta("note", "two\nlines");
    const auto csv = t.to_csv();
    CHECK(csv.find("# table: demo\n") == 0);
    CHECK(csv.find("# note: two\n# note: lines\n") != std::string::npos);
    CHECK(csv.find("a,b\n1,0.1\n2,nan\n") != std::string::npos);
    CHECK(t.meta_value("provenance") == provenance());
    const auto js = t.to_json();
    CHECK(js.find("null") != std::string::npos);
    CHECK(js.find("\"columns\"") != std::string::npos);
    CHECK(t.to_plot_data() == "# a b\n1 0.1\n2 nan\n");
}

TEST_CASE("format_double is shortest round trip") {
    for (double v : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -2.5}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(1000) == "1000");
    CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("odd squarefree enumeration and slope") {
    auto v = odd_squarefree_up_to(200);
    std::vector<u64> oracle;
    for (u64 D = 1; D <= 200; D += 2)
        if (is_squarefree_trial(D)) oracle.push_back(D);
    CHECK(v == oracle);
    CHECK(odd_squarefree_up_to(30) == std::vector<u64>{1, 3, 5, 7, 11, 13, 15, 17, 19, 21, 23, 29});
    std::vector<double> Y{500, 1000, 2000, 4000}, s;
    for (double y : Y) s.push_back(7 * std::pow(y, 1.5));
    CHECK(loglog_slope(Y, s) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), DomainError);
}

TEST_CASE("cost model") {
    auto c = estimate_central_cost(1, 5.0, false);
    CHECK(c.n_max == 5);
    CHECK(c.terms == 5);
    // D = 3 has discriminant 12, so n_max = floor(5 * 12^1.5)
    CHECK(estimate_central_cost(3, 5.0, false).n_max == static_cast<u64>(std::floor(5 * std::pow(12.0, 1.5))));
    CHECK(estimate_central_cost(100, 5.0, true).seconds > estimate_central_cost(100, 5.0, false).seconds);
}

TEST_CASE("twisted central values") {
    auto Ds = odd_squarefree_up_to(41);
    // the oracle below uses the default cutoff 11 sqrt(q), q <= 164^3
    auto sys = lseries::sym2_delta(25000);
    auto one = twisted_central_values(sys, Ds, 5.0, 1);
    auto three = twisted_central_values(sys, Ds, 5.0, 3);
    CHECK(one == three);

    // independent route: the generic approximate functional equation with a larger cutoff
    auto tab = sys.coefficient_table(sys.max_prime());
    for (std::size_t i : {0ul, 2ul, 5ul}) {
        const i64 d = lseries::primitive_discriminant(Ds[i]);
        auto P = lseries::gl3_twist_params(sys, d);
        lseries::CoeffFn a = [&](u64 n) { return n < tab.size() ? tab[n] * double(kronecker(d, n)) : cplx(0.0); };
        auto v = lseries::lvalue(P, a, 0.5);
        const double LS = lseries::remove_two_factor(sys, kronecker(d, 2), 0.5, v.L).real();
        CAPTURE(Ds[i]);
        CHECK(std::abs(one[i] - LS) < 1e-4 * std::max(1.0, std::abs(LS)));
    }
    auto nz = count_nonvanishing(sys, 41, 5.0, 1e-3, 2);
    CHECK(nz.total == Ds.size());
    CHECK(nz.nonzero <= nz.total);
}

TEST_CASE("meansquare small ladders") {
    ExperimentConfig cfg;
    cfg.Y_ladder = {1, 25, 61};
    auto t = exp_meansquare(cfg);
    REQUIRE(t.rows.size() == 3);
    auto sys = lseries::sym2_delta(estimate_central_cost(1, 5.0, false).n_max + 10);
    const double L1 = twisted_central_values(sys, {1}, 5.0, 1)[0];
    CHECK(t.at(0, "sum") == doctest::Approx(L1 * L1).epsilon(1e-12));
    CHECK(t.at(1, "sum") >= t.at(0, "sum"));
    CHECK(t.at(2, "sum") >= t.at(1, "sum"));
    CHECK(t.at(2, "terms") == 31);
    CHECK(std::isnan(t.at(0, "slope")));

    // D = 9, 25, 27, 45, 49 reuse the value of their squarefree part
    auto Ds = odd_squarefree_up_to(61);
    auto sys2 = lseries::sym2_delta(estimate_central_cost(61, 5.0, false).n_max + 10);
    auto vals = twisted_central_values(sys2, Ds, 5.0, 1);
    double brute = 0;
    for (u64 D = 1; D <= 61; D += 2) {
        u64 D0 = D;
        for (u64 q = 3; q * q <= D0; q += 2)
            while (D0 % (q * q) == 0) D0 /= q * q;
        auto it = std::find(Ds.begin(), Ds.end(), D0);
        REQUIRE(it != Ds.end());
        brute += vals[it - Ds.begin()] * vals[it - Ds.begin()];
    }
    CHECK(t.at(2, "sum") == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("meansquare over budget marks the row infeasible") {
    ExperimentConfig cfg;
    cfg.Y_ladder = {15, 1000000};
    cfg.budget_seconds = 1;
    auto t = exp_meansquare(cfg);
    CHECK(t.at(0, "feasible") == 1);
    CHECK(t.at(1, "feasible") == 0);
    CHECK(std::isnan(t.at(1, "sum")));
}

TEST_CASE("nonvanishing: a single D") {
    ExperimentConfig cfg;
    cfg.x_ladder = {0.2};  // D <= floor(6 * 0.2) = 1
    auto t = exp_nonvanishing(cfg, qctx());
    auto sys = lseries::sym2_delta(estimate_central_cost(1, 5.0, false).n_max + 10);
    const double L1 = twisted_central_values(sys, {1}, 5.0, 1)[0];
    CHECK(t.at(0, "D_max") == 1);
    CHECK(t.at(0, "I") == doctest::Approx(L1 * std::exp(-5.0)).epsilon(1e-12));
    CHECK(t.at(0, "feasible") == 1);
    CHECK(t.meta_value("config") == cfg.echo());
}

TEST_CASE("determination") {
    auto A = lseries::sym2_delta(200);
    auto same = exp_determination(A, A, 3, 200, qctx());
    CHECK(same.meta_value("flags") == "0");
    for (std::size_t i = 0; i < same.rows.size(); ++i) {
        CHECK(same.at(i, "Rr_A") == same.at(i, "Rr_B"));
        CHECK(same.at(i, "differs") == 0);
    }
    auto B = residues::perturb_coefficient(A, 101, 0.1);
    auto pert = exp_determination(A, B, 3, 200, qctx());
    CHECK(pert.meta_value("flags") == "0");
    for (std::size_t i = 0; i < pert.rows.size(); ++i) {
        const bool at_r0 = pert.at(i, "r") == 101;
        CHECK(pert.at(i, "differs") == (at_r0 ? 1 : 0));
        if (at_r0) CHECK(pert.at(i, "a_B") - pert.at(i, "a_A") == doctest::Approx(0.1));
    }
    // small primes lie outside the claimed monotone range; a flag there is allowed, the table still forms
    auto B3 = residues::perturb_coefficient(A, 3, 0.1);
    auto small = exp_determination(A, B3, 3, 10, qctx());
    CHECK(small.rows.size() == 3);
    CHECK_THROWS_AS(exp_determination(A, A, 3, 400, qctx()), DomainError);
}

TEST_CASE("cli: errors are one line with nonzero exit") {
    auto r = cli({"suite", "nosuch"});
    CHECK(r.code == exit_code_for("E_USAGE"));
    CHECK(single_error_line(r.err));
    CHECK(r.err.find("E_USAGE") != std::string::npos);
    r = cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(single_error_line(r.err));
    r = cli({"exp", "meansquare", "--set", "field=Q5"});
    CHECK(r.code == exit_code_for("E_CONFIG"));
    CHECK(single_error_line(r.err));
    r = cli({"--config", "/nonexistent/cfg", "symbols"});
    CHECK(r.code == exit_code_for("E_IO"));
    CHECK(single_error_line(r.err));
    r = cli({"symbols", "--chi", "3", "9"});
    CHECK(r.code == exit_code_for("E_DOMAIN"));
    CHECK(single_error_line(r.err));
    r = cli({"lfun", "value", "--d", "9"});
    CHECK(single_error_line(r.err));
    CHECK(r.code != 0);
}

TEST_CASE("cli: module mirrors") {
    auto r = cli({"symbols", "--chi", "5", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("chi(5, 3) = -1") != std::string::npos);
    r = cli({"fegroup", "verify"});
    CHECK(r.code == 0);
    CHECK(r.out.find("order = 12") != std::string::npos);
    r = cli({"region", "pipeline"});
    CHECK(r.code == 0);
    for (const char* stage : {"# stage R1", "# stage R2", "# stage R3", "# stage final", "covered"})
        CHECK(r.out.find(stage) != std::string::npos);
    r = cli({"dds", "identity-check", "--point", "2.5", "2.5", "--cutoff", "300"});
    CHECK(r.out.find("residual = ") != std::string::npos);
    r = cli({"dds", "eval", "--point", "2.5", "2.5", "--cutoff", "200"});
    CHECK(r.code == 0);
    CHECK(r.out.find("s_re,s_im,w_re,w_im,order,X_D,X_N,value_re,value_im,tail\n") == 0);
    r = cli({"lfun", "fe-check", "--d", "5", "--w", "0.4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("residual = ") != std::string::npos);
    r = cli({"residue", "rr", "--r", "101"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Rr = ") != std::string::npos);
    r = cli({"exp", "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("meansquare") != std::string::npos);
    r = cli({"--version"});
    CHECK(r.out == provenance() + "\n");
}

TEST_CASE("cli: byte-identical output for a fixed config") {
    auto a = cli({"exp", "determination", "--set", "r_max=120", "--workers", "1"});
    auto b = cli({"exp", "determination", "--set", "r_max=120", "--workers", "1"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("# flags: 0") != std::string::npos);
    auto c = cli({"exp", "meansquare", "--set", "Y_ladder=1,41", "--workers", "2"});
    auto d = cli({"exp", "meansquare", "--set", "Y_ladder=1,41", "--workers", "2"});
    CHECK(c.out == d.out);
    auto j = cli({"exp", "meansquare", "--set", "Y_ladder=1,41", "--format", "json"});
    CHECK(j.out.find("\"table\": \"exp_meansquare\"") != std::string::npos);
    auto p = cli({"exp", "meansquare", "--set", "Y_ladder=1,41", "--plot-data"});
    CHECK(p.out.rfind("# Y sum slope", 0) == 0);

    const auto path = (std::filesystem::temp_directory_path() / "ddslab_xcli_out.csv").string();
    auto f = cli({"exp", "meansquare", "--set", "Y_ladder=1,41", "--workers", "2", "--out", path});
    CHECK(f.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("# table: exp_meansquare") == 0);
    std::remove(path.c_str());
}

TEST_CASE("cli: cache round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "ddslab_xcli_test.cache").string();
    auto r = cli({"lfun", "build-cache", "--max-prime", "500", "--path", path});
    REQUIRE(r.code == 0);
    auto a = cli({"residue", "rr", "--r", "101"});
    auto b = cli({"--set", "coeff_cache=" + path, "residue", "rr", "--r", "101"});
    CHECK(b.code == 0);
    CHECK(a.out == b.out);
    auto c = cli({"--set", "coeff_cache=" + path, "residue", "rr", "--r", "1009"});
    CHECK(c.code == exit_code_for("E_CONFIG"));
    std::remove(path.c_str());
}

TEST_CASE("criteria registry") {
    CHECK(criterion_count() == 14);
    CHECK_THROWS_AS(run_criterion(0, ExperimentConfig{}), UsageError);
    auto r = run_criterion(3, ExperimentConfig{});
    CHECK(r.pass);
    CHECK(format_criterion(r).rfind("criterion 3 PASS", 0) == 0);
}
