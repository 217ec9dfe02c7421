#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ddslab/dds.hpp"
#include "ddslab/fegroup.hpp"
#include "ddslab/residues.hpp"
#include "ddslab/ringarith.hpp"
#include "ddslab/xcli.hpp"

namespace ddslab::xcli {

namespace {

using fegroup::Q;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            failures += (pass ? "FAILED " : "; FAILED ") + what;
            pass = false;
        }
    }
};

const SymbolContext& qctx() {
    static SymbolContext c = quadchar::build_context(ringarith::BaseField::rational());
    return c;
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// ---- 1 ----
void c1_group(Outcome& o) {
    using namespace fegroup;
    auto G = generate_group(phi(), psi());
    o.require(G.size() == 12, "group order 12 (got " + std::to_string(G.size()) + ")");
    o.require(phi().compose(phi()).is_identity(), "phi^2 = id");
    o.require(psi().compose(psi()).is_identity(), "psi^2 = id");
    AffineMap2 r = phi().compose(psi()), acc = identity_map();
    bool third = false;
    for (int k = 1; k <= 6; ++k) {
        acc = r.compose(acc);
        if (k == 3) third = acc.is_identity();
    }
    o.require(acc.is_identity(), "(phi psi)^6 = id");
    o.require(!third, "(phi psi)^3 != id");
    for (const auto& g : G) o.require(g.M.det() == 1 || g.M.det() == -1, "unimodular linear part for " + g.name);
    o.detail << "12 maps, relations exact";
}

// ---- 2 ----
void c2_pipeline(Outcome& o) {
    using namespace fegroup;
    auto st = continuation_pipeline();
    o.require(st.size() == 7 && st.back().name == "final", "pipeline stages");
    const auto& R3 = st[4].region;
    o.require(st[4].name == "R3", "stage R3");
    auto fin = hull({R3, transform_region(phi(), R3)});
    o.require(fin == st.back().region, "final = hull(R3 u phi R3)");
    auto cov = box_coverage(fin, -100, 100, 201);
    o.require(cov.total == 201 * 201 && cov.covered(), "box coverage");
    o.detail << cov.inside << "/" << cov.total << " grid points inside";
}

// ---- 3 ----
void c3_boundary(Outcome& o) {
    using namespace fegroup;
    Q lhs = Q(-191) / 62 * (Q(1) / 2) + Q(5) / 2;
    o.require(lhs == Q(119) / 124, "-(191/62)(1/2) + 5/2 = 119/124");
    Region P = region_two_piece();
    Vec2 shared{Q(1) / 2, Q(119) / 124};
    o.require(P.pieces.size() == 2, "two region pieces");
    for (const auto& piece : P.pieces) o.require(piece.contains_closure(shared), "piece closure contains (1/2, 119/124)");
    o.detail << "value " << qstr(lhs) << ", shared point on both closures";
}

// ---- 4 ----
int legendre_euler(i64 a, u64 p) {
    u64 r = static_cast<u64>(((a % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p));
    if (r == 0) return 0;
    return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

int kronecker_oracle(i64 d, u64 n) {
    int v = 1;
    for (u64 p = 3; p <= n; p += 2)
        while (n % p == 0) {
            v *= legendre_euler(d, p);
            n /= p;
        }
    return v;
}

void c4_symbols(Outcome& o) {
    const auto& ctx = qctx();
    u64 pairs = 0, bad_chi = 0, bad_rec = 0;
    for (u64 D = 1; D <= 500; D += 2)
        for (u64 N = 1; N <= 500; N += 2) {
            if (gcd_u64(D, N) != 1) continue;
            ++pairs;
            int c = quadchar::chi_int(D, N);
            bad_chi += c != kronecker_oracle(static_cast<i64>(D), N);
            bad_rec += c * quadchar::chi_int(N, D) != quadchar::eta(ctx.class_of(D), ctx.class_of(N), ctx);
        }
    o.require(bad_chi == 0, std::to_string(bad_chi) + " oracle mismatches");
    o.require(bad_rec == 0, std::to_string(bad_rec) + " reciprocity mismatches");
    o.detail << pairs << " coprime odd pairs";
}

// ---- 5 ----
void c5_sieve(Outcome& o) {
    using dds::Rational;
    std::mt19937_64 rng(20261017);
    std::uniform_int_distribution<u64> norm(0, 4999), len(1, 60);
    std::uniform_int_distribution<int> num(-50, 50), den(1, 30);
    const u64 rs[] = {1, 3, 5, 15, 21, 105, 1155};
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        dds::IdealFunction f;
        u64 n = len(rng);
        for (u64 i = 0; i < n; ++i) f[2 * norm(rng) + 1] = Rational(num(rng), den(rng));
        f[9 * (2 * norm(rng) % 1111 + 1)] = Rational(num(rng), den(rng));
        ok += dds::sieve_identity_check(f, rs[trial % 7]).ok;
    }
    o.require(ok == 100, "random rational functions (" + std::to_string(ok) + "/100)");

    // truncated D-side of the pure series as an exact dyadic-rational function of D
    const auto& ctx = qctx();
    auto sys = lseries::sym2_delta(1300);
    const cplx s(2.5, 0.0), w(2.5, 0.0);
    int dds_ok = 0, dds_total = 0;
    for (u64 X : {60, 300}) {
        dds::IdealFunction f;
        for (u64 D = 1; D <= X; D += 2) {
            CplxSum inner;
            for (u64 N = 1; N <= X; N += 2)
                if (gcd_u64(D, N) == 1)
                    inner.add(sys.coeff(N) * double(quadchar::chi_int(D, N)) * std::exp(-s * std::log(double(N))));
            f[D] = Rational((inner.value() * std::exp(-w * std::log(double(D)))).real());
        }
        for (u64 r : {1, 3, 15, 105}) {
            ++dds_total;
            dds_ok += dds::sieve_identity_check(f, r).ok;
        }
    }
    o.require(dds_ok == dds_total, "DDS truncations exact");

    // sum_r mu(r) Z_r = Z_star once r^2 reaches the D cutoff
    dds::CorrectionCache cc(sys);
    auto tr = dds::Twist::trivial(ctx);
    double worst = 0;
    for (u64 X : {200, 1200}) {
        dds::TruncationSpec t;
        t.X_D = t.X_N = X;
        const cplx zs(2.3, 0.2), zw(2.1, -0.3);
        auto star = dds::Z_star(zs, zw, sys, ctx, tr, tr, t).value;
        cplx acc = 0.0;
        for (u64 r = 1; r * r <= X; r += 2) {
            int mu = ringarith::moebius_u64(r);
            if (mu) acc += double(mu) * dds::Z_r(zs, zw, sys, cc, ctx, r, t).value;
        }
        worst = std::max(worst, std::abs(acc - star) / std::abs(star));
    }
    o.require(worst < 1e-12, "sum mu(r) Z_r = Z_star (" + sci(worst) + ")");
    o.detail << ok << "/100 random, " << dds_ok << "/" << dds_total << " DDS exact, Z_r combination " << sci(worst);
}

// ---- 6 ----
void c6_identity(Outcome& o) {
    const auto& ctx = qctx();
    auto sys = lseries::sym2_delta(10007);
    dds::TruncationSpec t;
    t.X_D = t.X_N = 10000;
    auto a = dds::Z_pure(cplx(2.5), cplx(2.5), sys, ctx, t);
    t.order = dds::Order::NFirst;
    auto b = dds::Z_pure(cplx(2.5), cplx(2.5), sys, ctx, t);
    const double r1 = std::abs(a.value - b.value) / std::max(1.0, std::abs(a.value));
    o.require(r1 < 1e-6, "Z_pure orders (" + sci(r1) + ")");

    dds::CorrectionCache cc(sys);
    dds::SeriesRequest req;
    req.alpha = dds::Twist::trivial(ctx);
    req.beta = dds::Twist::trivial(ctx);
    dds::TruncationSpec t2;
    t2.X_D = t2.X_N = 2000;
    auto c = dds::basic_identity_check(req, sys, cc, ctx, t2, 1e-5);
    o.require(c.residual < 1e-5, "corrected_Z sides (" + sci(c.residual) + ")");
    o.detail << "Z_pure residual " << sci(r1) << ", corrected residual " << sci(c.residual);
}

// ---- 7 ----
void c7_correction(Outcome& o) {
    const auto& ctx = qctx();
    auto sys = lseries::sym2_delta(1000);
    double worst_a = 0, worst_b = 0;
    for (u64 P : {3, 5, 7, 11, 101, 199, 997}) {
        auto lc = dds::solve_correction_local(P, sys);
        o.require(lc.a_side().at(0, 0) == cplx(1.0) && lc.b_side().at(0, 0) == cplx(1.0),
                  "c[0][0] = 1 at " + std::to_string(P));
        auto r = dds::correction_fe_residual(lc, 10, P);
        worst_a = std::max(worst_a, r.a_side);
        worst_b = std::max(worst_b, r.b_side);
    }
    o.require(worst_a < 1e-10 && worst_b < 1e-10, "functional equations (" + sci(worst_a) + ", " + sci(worst_b) + ")");

    dds::CorrectionCache cc(sys);
    auto tr = dds::Twist::trivial(ctx);
    const double C_half = 3.0, eps = 0.01;
    double worst_ratio = 0;
    for (auto p : primes_up_to(997)) {
        if (p < 3) continue;
        for (u64 d0 : {1, 3, 7}) {
            if (d0 == p) continue;
            for (int e : {1, 2}) {
                if (e == 2 && p > 60) continue;
                const u64 D1 = ipow(p, e);
                const double a = std::abs(dds::a_factor(0.5, d0 * D1 * D1, tr, cc, ctx));
                worst_ratio = std::max(worst_ratio, a / std::pow(double(D1), 5.0 / 7 + eps));
            }
        }
    }
    o.require(worst_ratio <= C_half, "|a(1/2, D)| <= 3 |D1|^{5/7+0.01} (max ratio " + sci(worst_ratio) + ")");
    o.detail << "FE residuals " << sci(worst_a) << " / " << sci(worst_b) << ", bound ratio " << sci(worst_ratio);
}

// ---- 8 ----
void c8_closed_forms(Outcome& o) {
    auto sys = lseries::sym2_delta(100);
    double worst = 0;
    int count = 0;
    for (double s : {0.6, 0.75, 1.0})
        for (auto r : primes_up_to(100)) {
            if (r == 2) continue;
            auto lp = residues::local_pair(sys, r, s, 60);
            worst = std::max({worst, std::abs(lp.L1_series - lp.L1) / std::abs(lp.L1),
                              std::abs(lp.L2_series - lp.L2) / std::abs(lp.L2)});
            ++count;
        }
    o.require(worst <= 1e-10, "series vs closed form (" + sci(worst) + ")");
    o.detail << count << " (r, s) pairs, worst relative error " << sci(worst);
}

// ---- 9 ----
void c9_dedekind(Outcome& o) {
    const auto& ctx = qctx();
    int total = 0, trivial = 0;
    double worst_limit = 0, worst_pole = 0, worst_euler = 0;
    for (const auto& rho : ctx.characters())
        for (u64 r : {1, 3, 5})
            for (u64 N : {1, 9, 15}) {
                auto d = residues::dedekind_residue_factor_check(rho, r, N, ctx, 2.0, 10000, 1000);
                ++total;
                o.require(d.per_prime_exact, "per-prime identity");
                worst_euler = std::max(worst_euler, d.euler_residual);
                if (d.trivial_branch) {
                    ++trivial;
                    worst_limit = std::max(worst_limit, d.limit_rel_error);
                } else {
                    worst_pole = std::max(worst_pole, d.pole_magnitude);
                }
            }
    o.require(worst_euler < 1e-10, "Euler form at w = 2 (" + sci(worst_euler) + ")");
    o.require(trivial > 0 && worst_limit < 0.01, "trivial-branch limit within 1% (" + sci(worst_limit) + ")");
    o.require(worst_pole < 1e-3, "no pole on nontrivial branches (" + sci(worst_pole) + ")");
    o.detail << total << " cases (" << trivial << " trivial), limit error " << sci(worst_limit) << ", pole "
             << sci(worst_pole);
}

// ---- 10 ----
void c10_gl1(Outcome& o) {
    double worst = 0;
    int n = 0;
    for (i64 d = 1; d <= 50; ++d) {
        if (d != 1 && !ringarith::is_fundamental_discriminant(d)) continue;
        lseries::CoeffFn a = [d](u64 k) { return cplx(d == 1 ? 1.0 : double(kronecker(d, k))); };
        for (double w : {0.4, 0.6}) {
            worst = std::max(worst, lseries::fe_self_check(lseries::gl1_params(d), a, w).residual);
            ++n;
        }
    }
    o.require(worst < 1e-6, "completed functional equation (" + sci(worst) + ")");
    o.detail << n << " (d, w) pairs, worst residual " << sci(worst);
}

// ---- 11 ----
void c11_determination(Outcome& o) {
    const auto& ctx = qctx();
    auto sc = residues::rr_monotone_scan(101, 0.5, -2.0, 2.0, 0.01);
    o.require(sc.strictly_monotone && sc.a.size() == 401, "R_r strictly monotone at r = 101");
    auto A = lseries::sym2_delta(200);
    auto B = residues::perturb_coefficient(A, 101, 0.1);
    auto same = exp_determination(A, A, 3, 200, ctx);
    auto pert = exp_determination(A, B, 3, 200, ctx);
    double self_flags = 0, self_diff = 0;
    for (std::size_t i = 0; i < same.rows.size(); ++i) {
        self_flags += same.at(i, "flag");
        self_diff += same.at(i, "differs");
    }
    o.require(self_flags == 0 && self_diff == 0, "sysA vs itself has no flags");
    bool seen = false;
    for (std::size_t i = 0; i < pert.rows.size(); ++i)
        if (pert.at(i, "r") == 101) seen = pert.at(i, "differs") == 1 && pert.at(i, "flag") == 0;
    o.require(seen, "perturbation at r0 = 101 detected");
    o.detail << "monotone (" << (sc.direction > 0 ? "increasing" : "decreasing") << ", min step " << sci(sc.min_gap)
             << "), perturbation detected, 0 false flags";
}

// ---- 12 ----
void c12_nonvanishing(Outcome& o, const ExperimentConfig& base) {
    ExperimentConfig cfg;
    cfg.coeff_cache = base.coeff_cache;
    cfg.workers = base.workers;
    cfg.x_ladder = {1000, 3000, 10000};
    cfg.budget_seconds = 600;
    auto t = exp_nonvanishing(cfg, qctx());
    double lo = INFINITY, hi = -INFINITY;
    std::ostringstream rows;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double x = t.at(i, "x"), v = t.at(i, "I_over_x");
        if (t.at(i, "feasible") == 0) {
            o.require(false, "x = " + format_double(x) + " out of budget (estimated " + sci(t.at(i, "est_seconds")) + " s)");
            continue;
        }
        o.require(v > 0, "I(x)/x > 0 at x = " + format_double(x));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        rows << " I(" << format_double(x) << ")/x = " << format_double(v) << ";";
    }
    if (std::isfinite(lo)) o.require((hi - lo) / lo <= 0.2, "I(x)/x within 20% (spread " + sci((hi - lo) / lo) + ")");
    const auto nz = t.meta_value("nonzero_twists_D_le_1000");
    o.require(!nz.empty() && nz[0] != '0', "a nonzero twisted central value with D <= 1000");
    o.detail << "nonzero twists " << nz << ";" << rows.str() << " predicted slope " << format_double(t.at(0, "predicted_slope"));
}

// ---- 13 ----
void c13_meansquare(Outcome& o, const ExperimentConfig& base) {
    ExperimentConfig cfg;
    cfg.coeff_cache = base.coeff_cache;
    cfg.workers = base.workers;
    cfg.Y_ladder = {500, 1000, 2000, 4000};
    cfg.budget_seconds = 600;
    auto t = exp_meansquare(cfg);
    std::vector<double> Y, v;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        o.require(t.at(i, "feasible") == 1, "Y = " + format_double(t.at(i, "Y")) + " within budget");
        if (t.at(i, "feasible") == 1) {
            Y.push_back(t.at(i, "Y"));
            v.push_back(t.at(i, "sum"));
        }
    }
    if (Y.size() == 4) {
        const double slope = loglog_slope(Y, v);
        o.require(slope <= 1.7, "fitted slope <= 1.7 (" + format_double(slope) + ")");
        for (std::size_t i = 1; i < v.size(); ++i) o.require(v[i] >= v[i - 1], "sum nondecreasing in Y");
        o.detail << "fitted slope " << format_double(slope) << ", incremental";
        for (std::size_t i = 1; i < t.rows.size(); ++i) o.detail << " " << format_double(t.at(i, "slope"));
    }
}

// ---- 14 ----
void c14_probe(Outcome& o) {
    auto sys = lseries::sym2_delta(10007);
    auto rep = residues::hypothesis_probe(sys, {0.75}, {1000, 10000});
    const double drift = rep.rows.back().drift;
    o.require(drift < 5e-4, "3-digit stability between X = 1e3 and 1e4 (drift " + sci(drift) + ")");
    o.detail << "drift " << sci(drift);
}

struct Spec {
    const char* name;
    double limit;
    std::function<void(Outcome&, const ExperimentConfig&)> fn;
};

const std::vector<Spec>& specs() {
    static const std::vector<Spec> s = {
        {"D6 functional-equation group", 1, [](Outcome& o, const ExperimentConfig&) { c1_group(o); }},
        {"continuation pipeline covers the box", 5, [](Outcome& o, const ExperimentConfig&) { c2_pipeline(o); }},
        {"boundary concurrency at (1/2, 119/124)", 1, [](Outcome& o, const ExperimentConfig&) { c3_boundary(o); }},
        {"quadratic symbol oracle and reciprocity", 10, [](Outcome& o, const ExperimentConfig&) { c4_symbols(o); }},
        {"Moebius sieve identities", 10, [](Outcome& o, const ExperimentConfig&) { c5_sieve(o); }},
        {"rearrangement and basic identity", 120, [](Outcome& o, const ExperimentConfig&) { c6_identity(o); }},
        {"correction solver", 30, [](Outcome& o, const ExperimentConfig&) { c7_correction(o); }},
        {"local closed forms", 30, [](Outcome& o, const ExperimentConfig&) { c8_closed_forms(o); }},
        {"Dedekind residue identity", 60, [](Outcome& o, const ExperimentConfig&) { c9_dedekind(o); }},
        {"GL(1) completed functional equation", 120, [](Outcome& o, const ExperimentConfig&) { c10_gl1(o); }},
        {"R_r monotonicity and determination", 60, [](Outcome& o, const ExperimentConfig&) { c11_determination(o); }},
        {"nonvanishing experiment", 600, c12_nonvanishing},
        {"mean-square growth", 600, c13_meansquare},
        {"hypothesis probe", 60, [](Outcome& o, const ExperimentConfig&) { c14_probe(o); }},
    };
    return s;
}

}  // namespace

int criterion_count() { return static_cast<int>(specs().size()); }

CriterionResult run_criterion(int id, const ExperimentConfig& cfg) {
    if (id < 1 || id > criterion_count()) throw UsageError("no criterion " + std::to_string(id));
    const auto& sp = specs()[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = sp.name;
    r.limit_seconds = sp.limit;
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
        sp.fn(o, cfg);
    } catch (const Error& e) {
        o.require(false, e.code() + ": " + e.what());
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(r.seconds < r.limit_seconds, "time limit " + format_double(r.limit_seconds) + " s");
    r.pass = o.pass;
    r.detail = o.detail.str();
    if (!o.failures.empty()) r.detail += (r.detail.empty() ? "" : " | ") + o.failures;
    return r;
}

std::string format_criterion(const CriterionResult& r) {
    std::ostringstream os;
    os.precision(2);
    os << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " [" << r.name << "] " << std::fixed
       << r.seconds << "s/" << std::defaultfloat << r.limit_seconds << "s: " << r.detail;
    return os.str();
}

}  // namespace ddslab::xcli
