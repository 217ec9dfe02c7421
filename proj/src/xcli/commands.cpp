#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ddslab/dds.hpp"
#include "ddslab/fegroup.hpp"
#include "ddslab/residues.hpp"
#include "ddslab/xcli.hpp"

namespace ddslab::xcli {

namespace {

struct Globals {
    std::string config;
    std::vector<std::string> sets;
    unsigned workers = 0;
    std::string out;
    std::string format;
    bool plot_data = false;
};

ExperimentConfig make_config(const Globals& g) {
    ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(g.config);
    for (const auto& kv : g.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        auto key = kv.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        cfg.set(key, kv.substr(eq + 1));
    }
    if (g.workers) cfg.workers = g.workers;
    if (!g.out.empty()) cfg.output = g.out;
    if (!g.format.empty()) cfg.format = g.format;
    cfg.validate();
    return cfg;
}

const SymbolContext& qctx() {
    static SymbolContext c = quadchar::build_context(ringarith::BaseField::rational());
    return c;
}

void emit(const std::string& text, const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw IoError("cannot write " + cfg.output);
    f << text;
    if (!f) throw IoError("write failed for " + cfg.output);
}

void emit_table(const ResultTable& t, const ExperimentConfig& cfg, bool plot, std::ostream& out) {
    emit(plot ? t.to_plot_data() : cfg.format == "json" ? t.to_json() : t.to_csv(), cfg, out);
}

std::string cstr(cplx z) { return format_double(z.real()) + " " + format_double(z.imag()); }

cplx point_of(const std::vector<double>& v) {
    if (v.empty() || v.size() > 2) throw UsageError("a point is RE [IM]");
    return {v[0], v.size() == 2 ? v[1] : 0.0};
}

// ---- subcommand bodies ----

int cmd_symbols(const std::vector<u64>& pair, std::ostream& out) {
    const auto& ctx = qctx();
    if (pair.empty()) {
        out << ctx.to_text();
        return 0;
    }
    const u64 D = pair[0], N = pair[1];
    if (D % 2 == 0 || N % 2 == 0 || gcd_u64(D, N) != 1) throw DomainError("chi needs odd coprime D and N");
    out << "chi(" << D << ", " << N << ") = " << quadchar::chi_int(D, N) << "\n";
    out << "eta([" << D << "], [" << N << "]) = " << quadchar::eta(ctx.class_of(D), ctx.class_of(N), ctx) << "\n";
    return 0;
}

struct LfunArgs {
    int degree = 1;
    i64 d = 1;
    std::vector<double> s{0.5};
};

lseries::CompletedLParams lfun_setup(const LfunArgs& a, const ExperimentConfig& cfg, CoefficientSystem& sys,
                                     lseries::CoeffFn& coeff, u64& needed) {
    if (a.d != 1 && !ringarith::is_fundamental_discriminant(a.d)) throw DomainError(std::to_string(a.d) + " is not a fundamental discriminant");
    const i64 d = a.d;
    if (a.degree == 1) {
        coeff = [d](u64 n) { return cplx(d == 1 ? 1.0 : double(kronecker(d, n))); };
        return lseries::gl1_params(d);
    }
    if (a.degree != 3) throw UsageError("degree must be 1 or 3");
    // conductor of the twist is d^3 over the level-one system
    needed = static_cast<u64>(std::ceil(11.0 * std::pow(std::abs(double(d)), 1.5))) + 2;
    sys = load_system(cfg, needed);
    auto P = lseries::gl3_twist_params(sys, d);
    auto tab = std::make_shared<std::vector<cplx>>(sys.coefficient_table(sys.max_prime()));
    coeff = [tab, d](u64 n) {
        return n < tab->size() ? (*tab)[n] * double(d == 1 ? 1 : kronecker(d, n)) : cplx(0.0);
    };
    return P;
}

int cmd_lfun_value(const LfunArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    CoefficientSystem sys;
    lseries::CoeffFn coeff;
    u64 needed = 0;
    auto P = lfun_setup(a, cfg, sys, coeff, needed);
    auto v = lseries::lvalue(P, coeff, point_of(a.s));
    out << "degree = " << a.degree << "\nd = " << a.d << "\ns = " << cstr(point_of(a.s)) << "\nL = " << cstr(v.L)
        << "\nLambda = " << cstr(v.Lambda) << "\nterms = " << v.terms << "\n";
    return 0;
}

int cmd_lfun_fe(const LfunArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    CoefficientSystem sys;
    lseries::CoeffFn coeff;
    u64 needed = 0;
    auto P = lfun_setup(a, cfg, sys, coeff, needed);
    auto r = lseries::fe_self_check(P, coeff, point_of(a.s));
    out << "lhs = " << cstr(r.lhs) << "\nrhs = " << cstr(r.rhs) << "\nresidual = " << format_double(r.residual) << "\n";
    return 0;
}

int cmd_build_cache(u64 max_prime, std::string path, const ExperimentConfig& cfg, std::ostream& out) {
    ExperimentConfig c = cfg;
    c.coeff_cache.clear();
    auto sys = load_system(c, max_prime);
    if (path.empty()) path = lseries::cache_dir() + "/" + sys.label + "-" + std::to_string(sys.max_prime()) + ".cache";
    auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    lseries::write_cache(path, sys);
    out << "wrote " << path << " (" << sys.primes().size() << " primes, max " << sys.max_prime() << ")\n";
    return 0;
}

struct DdsArgs {
    std::vector<double> point{2.5, 2.5};
    std::vector<u64> cutoff{2000};
    std::string order = "D";
    double tol = 1e-5;
};

dds::TruncationSpec dds_box(const DdsArgs& a) {
    dds::TruncationSpec t;
    t.X_D = a.cutoff.at(0);
    t.X_N = a.cutoff.size() > 1 ? a.cutoff[1] : a.cutoff[0];
    if (a.order == "N") t.order = dds::Order::NFirst;
    else if (a.order != "D") throw UsageError("order must be D or N");
    t.validate();
    return t;
}

int cmd_dds_identity(const DdsArgs& a, const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    auto t = dds_box(a);
    auto sys = load_system(cfg, std::max(t.X_D, t.X_N));
    dds::CorrectionCache cc(sys);
    dds::SeriesRequest req;
    req.s = a.point.at(0);
    req.w = a.point.at(1);
    req.alpha = dds::Twist::trivial(qctx());
    req.beta = req.alpha;
    auto c = dds::basic_identity_check(req, sys, cc, qctx(), t, a.tol);
    out << "lhs = " << cstr(c.lhs) << "\nrhs = " << cstr(c.rhs) << "\nresidual = " << format_double(c.residual)
        << "\nok = " << (c.ok ? "true" : "false") << "\n";
    if (!c.ok) {
        err << "error E_CHECK: residual " << format_double(c.residual) << " above " << format_double(a.tol) << "\n";
        return 1;
    }
    return 0;
}

int cmd_dds_eval(const DdsArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    auto t = dds_box(a);
    auto sys = load_system(cfg, std::max(t.X_D, t.X_N));
    const cplx s = a.point.at(0), w = a.point.at(1);
    auto v = dds::Z_pure(s, w, sys, qctx(), t);
    std::ostringstream os;
    os << "s_re,s_im,w_re,w_im,order,X_D,X_N,value_re,value_im,tail\n"
       << format_double(s.real()) << "," << format_double(s.imag()) << "," << format_double(w.real()) << ","
       << format_double(w.imag()) << "," << dds::order_name(t.order) << "," << t.X_D << "," << t.X_N << ","
       << format_double(v.value.real()) << "," << format_double(v.value.imag()) << "," << format_double(v.tail)
       << "\n";
    emit(os.str(), cfg, out);
    return 0;
}

int cmd_region_pipeline(std::ostream& out) {
    auto stages = fegroup::continuation_pipeline();
    for (const auto& st : stages) {
        out << "# stage " << st.name << "\n" << st.region.to_csv();
    }
    auto cov = fegroup::box_coverage(stages.back().region, -100, 100, 201);
    out << "coverage " << cov.inside << "/" << cov.total << " " << (cov.covered() ? "covered" : "not covered") << "\n";
    return cov.covered() ? 0 : 1;
}

int cmd_fegroup_verify(std::ostream& out) {
    using namespace fegroup;
    auto G = generate_group(phi(), psi());
    for (const auto& g : G) out << g.str() << "\n";
    const AffineMap2 r = phi().compose(psi());
    AffineMap2 r3 = r.compose(r).compose(r);
    const bool a = phi().compose(phi()).is_identity(), b = psi().compose(psi()).is_identity(),
               c = r3.compose(r3).is_identity(), d = !r3.is_identity();
    out << "order = " << G.size() << "\n";
    out << "phi^2 = id: " << (a ? "yes" : "no") << "\n";
    out << "psi^2 = id: " << (b ? "yes" : "no") << "\n";
    out << "(phi psi)^6 = id: " << (c ? "yes" : "no") << "\n";
    out << "(phi psi)^3 != id: " << (d ? "yes" : "no") << "\n";
    return (G.size() == 12 && a && b && c && d) ? 0 : 1;
}

struct ResidueArgs {
    u64 r = 101;
    std::vector<double> s{0.5};
    int cls = 0;
    u64 X = 10000;
    std::vector<double> s_grid{0.75};
    std::vector<u64> X_ladder{1000, 3000, 10000};
};

quadchar::RayClass class_arg(int cls) {
    if (cls < 0 || cls > 3) throw UsageError("class must be 0..3");
    return quadchar::RayClass::from_index(cls, 2);
}

int cmd_residue_rr(const ResidueArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    auto sys = load_system(cfg, a.r);
    auto v = residues::Rr(sys, class_arg(a.cls), a.r, point_of(a.s), qctx());
    out << "r = " << a.r << "\nclass = " << a.cls << "\neta = " << v.eta << "\nRr = " << cstr(v.value)
        << "\nnumerator = " << cstr(v.numerator) << "\ndenominator = " << cstr(v.denominator)
        << "\nsingular = " << (v.singular ? "true" : "false") << "\n";
    return 0;
}

int cmd_residue_r1(const ResidueArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    auto sys = load_system(cfg, 2 * a.X);
    auto v = residues::R1(sys, class_arg(a.cls), point_of(a.s), a.X, qctx());
    out << "R1 = " << cstr(v.value) << "\nL_S = " << cstr(v.L_S) << "\nsym2 = " << cstr(v.sym2)
        << "\nsym2_2X = " << cstr(v.sym2_2X) << "\nT = " << cstr(v.T.value) << "\nT_drift = " << format_double(v.T.drift)
        << "\nflagged = " << (v.flagged ? "true" : "false") << "\n";
    return 0;
}

int cmd_residue_probe(const ResidueArgs& a, const ExperimentConfig& cfg, std::ostream& out) {
    u64 top = 0;
    for (u64 X : a.X_ladder) top = std::max(top, X);
    auto sys = load_system(cfg, top);
    auto rep = residues::hypothesis_probe(sys, a.s_grid, a.X_ladder);
    ResultTable t("hypothesis_probe", {"s", "X", "value_re", "value_im", "drift"});
    for (const auto& row : rep.rows) t.add_row({row.s, double(row.X), row.value.real(), row.value.imag(), row.drift});
    for (const auto& [s, dg] : rep.digits) t.add_meta("digits_at_s_" + format_double(s), format_double(dg));
    emit_table(t, cfg, false, out);
    return 0;
}

// ---- suite ----

std::vector<int> suite_ids(const std::vector<std::string>& names) {
    std::vector<int> ids;
    const int n = criterion_count();
    for (const auto& name : names.empty() ? std::vector<std::string>{"all"} : names) {
        if (name == "all" || name == "acceptance") {
            for (int i = 1; i <= n; ++i) ids.push_back(i);
        } else if (name == "fast") {
            for (int i = 1; i <= n; ++i)
                if (i != 12 && i != 13) ids.push_back(i);
        } else {
            int id = 0;
            auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), id);
            if (ec != std::errc() || p != name.data() + name.size() || id < 1 || id > n)
                throw UsageError("unknown suite '" + name + "' (all, fast, or 1.." + std::to_string(n) + ")");
            ids.push_back(id);
        }
    }
    return ids;
}

int cmd_suite(const std::vector<std::string>& names, const ExperimentConfig& cfg, std::ostream& out,
              std::ostream& err) {
    auto ids = suite_ids(names);
    int failed = 0;
    for (int id : ids) {
        auto r = run_criterion(id, cfg);
        out << format_criterion(r) << "\n" << std::flush;
        failed += !r.pass;
    }
    out << provenance() << ": " << ids.size() - failed << "/" << ids.size() << " passed\n";
    if (failed) {
        err << "error E_ACCEPTANCE: " << failed << " of " << ids.size() << " criteria failed\n";
        return 1;
    }
    return 0;
}

std::string one_line(std::string m) {
    for (auto& c : m)
        if (c == '\n' || c == '\r') c = ' ';
    return m;
}

const CLI::App* deepest(const CLI::App& app) {
    const CLI::App* cur = &app;
    for (;;) {
        auto subs = cur->get_subcommands();
        if (subs.empty()) return cur;
        cur = subs.front();
    }
}

}  // namespace

int exit_code_for(const std::string& code) {
    if (code == "E_USAGE") return 2;
    if (code == "E_CONFIG") return 3;
    if (code == "E_IO") return 4;
    if (code == "E_DOMAIN") return 5;
    if (code == "E_NUMERIC") return 6;
    if (code == "E_STRUCTURE") return 7;
    return 1;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"ddslab experiment harness"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "key = value config file");
    app.add_option("--set", g.sets, "config override key=value (repeatable)");
    app.add_option("--workers", g.workers, "worker threads");
    app.add_option("--out", g.out, "output file");
    app.add_option("--format", g.format, "csv or json");
    app.add_flag("--plot-data", g.plot_data, "whitespace columns for gnuplot");
    app.add_flag_callback("--version", [&] { throw CLI::Success(); }, "print version");

    std::vector<u64> chi_pair;
    auto* sym = app.add_subcommand("symbols", "quadratic symbol context, or chi and eta for one pair");
    sym->add_option("--chi", chi_pair, "D N")->expected(2);

    LfunArgs la;
    u64 cache_max = 20000;
    std::string cache_path;
    auto* lfun = app.add_subcommand("lfun", "L-function values and caches");
    lfun->require_subcommand(1);
    auto* lval = lfun->add_subcommand("value", "L(s) by the approximate functional equation");
    auto* lfe = lfun->add_subcommand("fe-check", "Lambda(w) against eps Lambda(1 - w)");
    for (auto* c : {lval, lfe}) {
        c->add_option("--degree", la.degree, "1 (chi_d) or 3 (pi x chi_d)");
        c->add_option("--d", la.d, "fundamental discriminant");
        c->add_option("--s,--w", la.s, "point RE [IM]")->expected(1, 2);
    }
    auto* lcache = lfun->add_subcommand("build-cache", "write a coefficient cache file");
    lcache->add_option("--max-prime", cache_max, "largest prime");
    lcache->add_option("--path", cache_path, "cache file (default under the cache directory)");

    DdsArgs da;
    auto* ddsc = app.add_subcommand("dds", "double Dirichlet series");
    ddsc->require_subcommand(1);
    auto* did = ddsc->add_subcommand("identity-check", "corrected series against its M-side form");
    auto* dev = ddsc->add_subcommand("eval", "pure series at one point");
    for (auto* c : {did, dev}) {
        c->add_option("--point", da.point, "s w")->expected(2);
        c->add_option("--cutoff", da.cutoff, "X_D [X_N]")->expected(1, 2);
        c->add_option("--order", da.order, "D or N");
    }
    did->add_option("--tol", da.tol, "residual tolerance");

    auto* region = app.add_subcommand("region", "convergence regions");
    region->require_subcommand(1);
    auto* pipe = region->add_subcommand("pipeline", "continuation stages and box coverage");

    auto* feg = app.add_subcommand("fegroup", "functional-equation group");
    feg->require_subcommand(1);
    auto* verify = feg->add_subcommand("verify", "group elements and relations");

    ResidueArgs ra;
    auto* res = app.add_subcommand("residue", "residue factors");
    res->require_subcommand(1);
    auto* rrc = res->add_subcommand("rr", "R_r at one prime");
    rrc->add_option("--r", ra.r, "odd prime");
    rrc->add_option("--s", ra.s, "point RE [IM]")->expected(1, 2);
    rrc->add_option("--class", ra.cls, "class index 0..3");
    auto* r1c = res->add_subcommand("r1", "R_1 with its Euler-product pieces");
    r1c->add_option("--s", ra.s, "point RE [IM]")->expected(1, 2);
    r1c->add_option("--class", ra.cls, "class index 0..3");
    r1c->add_option("--X", ra.X, "prime cutoff");
    auto* prc = res->add_subcommand("probe", "partial products of the hypothesis probe");
    prc->add_option("--s", ra.s_grid, "s values");
    prc->add_option("--X", ra.X_ladder, "cutoff ladder");

    auto* exp = app.add_subcommand("exp", "experiments");
    exp->require_subcommand(1);
    auto* enw = exp->add_subcommand("nonvanishing", "I(x) ladder and twisted central values");
    auto* ems = exp->add_subcommand("meansquare", "sum of squared central values");
    auto* edt = exp->add_subcommand("determination", "R_r against a perturbed system");

    std::vector<std::string> suite_names;
    auto* suite = app.add_subcommand("suite", "acceptance criteria");
    suite->add_option("names", suite_names, "all, fast, or criterion numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << deepest(app)->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::Success&) {
        out << provenance() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error E_USAGE: " << one_line(e.what()) << "\n";
        return exit_code_for("E_USAGE");
    }

    try {
        const ExperimentConfig cfg = make_config(g);
        if (*sym) return cmd_symbols(chi_pair, out);
        if (*lval) return cmd_lfun_value(la, cfg, out);
        if (*lfe) return cmd_lfun_fe(la, cfg, out);
        if (*lcache) return cmd_build_cache(cache_max, cache_path, cfg, out);
        if (*did) return cmd_dds_identity(da, cfg, out, err);
        if (*dev) return cmd_dds_eval(da, cfg, out);
        if (*pipe) return cmd_region_pipeline(out);
        if (*verify) return cmd_fegroup_verify(out);
        if (*rrc) return cmd_residue_rr(ra, cfg, out);
        if (*r1c) return cmd_residue_r1(ra, cfg, out);
        if (*prc) return cmd_residue_probe(ra, cfg, out);
        if (*enw) {
            emit_table(exp_nonvanishing(cfg, qctx()), cfg, g.plot_data, out);
            return 0;
        }
        if (*ems) {
            emit_table(exp_meansquare(cfg), cfg, g.plot_data, out);
            return 0;
        }
        if (*edt) {
            auto A = load_system(cfg, cfg.r_max);
            auto B = residues::perturb_coefficient(A, cfg.r0, cfg.delta);
            emit_table(exp_determination(A, B, cfg.r_min, cfg.r_max, qctx()), cfg, g.plot_data, out);
            return 0;
        }
        if (*suite) return cmd_suite(suite_names, cfg, out, err);
        throw UsageError("no command");
    } catch (const Error& e) {
        err << "error " << e.code() << ": " << one_line(e.what()) << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error E_INTERNAL: " << one_line(e.what()) << "\n";
        return 1;
    }
}

}  // namespace ddslab::xcli
