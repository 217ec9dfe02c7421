#include "ddslab/residues.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/special_functions/expint.hpp>

#include "ddslab/ringarith.hpp"

namespace ddslab::residues {

namespace {

void require_odd_prime(u64 r, const char* who) {
    if (r < 3 || r % 2 == 0 || !is_prime_u64(r)) throw DomainError(std::string(who) + ": r must be an odd prime");
}

cplx npow(double n, cplx s) { return std::exp(-s * std::log(n)); }

double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// true when every prime up to X is stored
bool covers(const CoefficientSystem& sys, u64 X) {
    const u64 m = sys.max_prime();
    if (X <= m) return true;
    if (X >= 2 * m) return false;
    for (u64 n = m + 1; n <= X; ++n)
        if (is_prime_u64(n)) return false;
    return true;
}

cplx odd_prime_product(const CoefficientSystem& sys, u64 X, const std::function<cplx(u64, const Satake&)>& f) {
    if (!covers(sys, X)) throw DomainError("Euler product to " + std::to_string(X) + " beyond stored primes");
    cplx v = 1.0;
    for (std::size_t i = 0; i < sys.primes().size(); ++i) {
        u64 p = sys.primes()[i];
        if (p > X) break;
        if (p == 2) continue;
        v *= f(p, sys.satake_table()[i]);
    }
    return v;
}

int class_eta(const SymbolContext& ctx, const RayClass& E, u64 n) {
    return ctx.eta[E.index()][ctx.class_of(n).index()];
}

}  // namespace

// ---- local series ----

LocalSeriesPair local_pair(const Satake& g, u64 r, cplx s, int K) {
    require_odd_prime(r, "local_pair");
    if (K < 0) throw DomainError("local_pair: K must be non-negative");
    const double rd = static_cast<double>(r);
    double gmax = 0;
    for (const auto& x : g) gmax = std::max(gmax, std::abs(x));
    if (gmax * gmax >= std::pow(rd, 2 * s.real()))
        throw DomainError("local_pair: divergent local factor at r = " + std::to_string(r));

    LocalSeriesPair lp;
    lp.r = r;
    lp.s = s;
    lp.K = K;
    cplx x = npow(rd, s), x2 = x * x;
    auto e = lseries::elementary(g);
    cplx prod = 1.0;
    for (const auto& gj : g) prod *= 1.0 - gj * gj * x2;
    lp.L2 = (1.0 + e[1] * x2) / prod;
    lp.L1 = x * (e[0] + e[2] * x2) / prod;

    auto h = lseries::h_series(g, 2 * K + 1);
    CplxSum odd, even;
    cplx xp = 1.0;
    for (int k = 0; k <= 2 * K + 1; ++k) {
        (k % 2 ? odd : even).add(h[k] * xp);
        xp *= x;
    }
    lp.L1_series = odd.value();
    lp.L2_series = even.value();
    // |h_k| <= C(k+2, 2) q^k with q = max|g_j| |x|
    double q = gmax * std::abs(x);
    double n = 2.0 * K + 2;
    lp.tail = q == 0 ? 0 : (n + 2) * (n + 1) / 2 * std::pow(q, n) / std::pow(1 - q, 3);
    return lp;
}

LocalSeriesPair local_pair(const CoefficientSystem& sys, u64 r, cplx s, int K) {
    if (!sys.has_prime(r)) throw DomainError("local_pair: no Satake data at " + std::to_string(r));
    return local_pair(sys.satake(r), r, s, K);
}

LocalSeriesPair local_pair_from_coefficient(double a, u64 r, cplx s) {
    require_odd_prime(r, "local_pair_from_coefficient");
    LocalSeriesPair lp;
    lp.r = r;
    lp.s = s;
    cplx x = npow(static_cast<double>(r), s), y = x * x;
    double c = a * a - 2 * a;
    cplx prod = 1.0 - c * y + c * y * y - y * y * y;
    lp.L1 = x * (a + y) / prod;
    lp.L2 = (1.0 + a * y) / prod;
    lp.L1_series = lp.L1;
    lp.L2_series = lp.L2;
    return lp;
}

// ---- R_r ----

RrValue Rr_from_pair(const LocalSeriesPair& lp, int eta) {
    const double inv = 1.0 / static_cast<double>(lp.r);
    RrValue v;
    v.eta = eta;
    v.numerator = (1.0 + inv) * lp.L1;
    v.denominator = inv + lp.L2;
    v.singular = std::abs(v.denominator) < 1e-14;
    v.value = static_cast<double>(eta) * v.numerator / v.denominator;
    return v;
}

RrValue Rr(const CoefficientSystem& sys, const RayClass& E, u64 r, cplx s, const SymbolContext& ctx) {
    return Rr_from_pair(local_pair(sys, r, s), class_eta(ctx, E, r));
}

MonotoneScan rr_monotone_scan(u64 r, double s, double a_lo, double a_hi, double step) {
    if (!(step > 0) || !(a_hi > a_lo)) throw DomainError("rr_monotone_scan: need a_lo < a_hi and step > 0");
    MonotoneScan sc;
    const auto n = static_cast<std::size_t>(std::llround((a_hi - a_lo) / step)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        double a = a_lo + static_cast<double>(i) * step;
        sc.a.push_back(a);
        sc.value.push_back(Rr_from_pair(local_pair_from_coefficient(a, r, s), 1).value.real());
    }
    int up = 0, down = 0;
    sc.min_gap = INFINITY;
    for (std::size_t i = 1; i < n; ++i) {
        double d = sc.value[i] - sc.value[i - 1];
        up += d > 0;
        down += d < 0;
        sc.min_gap = std::min(sc.min_gap, std::abs(d));
    }
    const int steps = static_cast<int>(n) - 1;
    sc.direction = up == steps ? 1 : down == steps ? -1 : 0;
    sc.strictly_monotone = sc.direction != 0;
    return sc;
}

// ---- Euler products ----

cplx sym2_partial(const CoefficientSystem& sys, cplx s, u64 X) {
    return odd_prime_product(sys, X, [&](u64 p, const Satake& g) {
        cplx x = npow(static_cast<double>(p), s), f = 1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) f *= 1.0 - g[i] * g[j] * x;
        return 1.0 / f;
    });
}

cplx T_local(const Satake& g, u64 P, cplx s) {
    const double p = static_cast<double>(P);
    cplx x = npow(p, s), x2 = x * x;
    auto e = lseries::elementary(g);
    cplx prod = 1.0;
    for (const auto& gj : g) prod *= 1.0 - gj * gj * x2;
    cplx L2 = (1.0 + e[1] * x2) / prod;
    cplx f = 1.0 + (L2 - 1.0) / (1.0 + 1.0 / p);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) f *= 1.0 - g[i] * g[j] * x2;
    return f;
}

TValue T_of_s(const CoefficientSystem& sys, cplx s, u64 X, double tol) {
    auto local = [&](u64 p, const Satake& g) { return T_local(g, p, s); };
    TValue t;
    t.value = odd_prime_product(sys, X, local);
    t.value_2X = odd_prime_product(sys, 2 * X, local);
    t.drift = rel_diff(t.value, t.value_2X);
    t.stabilized = t.drift < tol;
    return t;
}

cplx weighted_square_sum(const CoefficientSystem& sys, cplx s, u64 X, u64 coprime_to) {
    if (!covers(sys, X)) throw DomainError("weighted_square_sum: X beyond stored primes");
    Sieve sv(std::max<u64>(X, 2));
    CplxSum acc;
    for (u64 n = 1; n <= X; n += 2) {
        if (coprime_to > 1 && gcd_u64(n, coprime_to) != 1) continue;
        cplx a = 1.0;
        double w = 1.0;
        for (auto [p, e] : sv.factor(n)) {
            a *= sys.coeff_prime_power(p, 2 * e);
            w /= 1.0 + 1.0 / static_cast<double>(p);
        }
        const double nd = static_cast<double>(n);
        acc.add(a * w * npow(nd * nd, s));
    }
    return acc.value();
}

cplx T_literal(const CoefficientSystem& sys, cplx s, u64 X) {
    return weighted_square_sum(sys, s, X) / sym2_partial(sys, 2.0 * s, X);
}

// ---- R_1 ----

cplx L_S_factor(const CoefficientSystem& sys, const RayClass& E, cplx s, const SymbolContext& ctx) {
    i64 d = lseries::primitive_discriminant(ctx.representatives.at(E.index()));
    cplx v = 1.0;
    for (u64 p : ctx.S) {
        int c = kronecker(d, p);
        if (c == 0) continue;
        if (!sys.has_prime(p)) throw ConfigError("L_S factor: no Satake data at the S-prime " + std::to_string(p));
        cplx x = static_cast<double>(c) * npow(static_cast<double>(p), s);
        for (const auto& g : sys.satake(p)) v /= 1.0 - g * x;
    }
    return v;
}

R1Report R1(const CoefficientSystem& sys, const RayClass& E, cplx s, u64 X, const SymbolContext& ctx, double tol) {
    R1Report rep;
    rep.A_F = ctx.field.zeta_residue;
    rep.h_C = ctx.h_C;
    rep.zeta2 = lseries::riemann_zeta(2.0).real();
    for (u64 p : ctx.S) rep.S_product /= 1.0 + 1.0 / static_cast<double>(p);
    rep.L_S = L_S_factor(sys, E, s, ctx);
    rep.sym2 = sym2_partial(sys, 2.0 * s, X);
    rep.sym2_2X = sym2_partial(sys, 2.0 * s, 2 * X);
    rep.T = T_of_s(sys, s, X, tol);
    rep.flagged = !rep.T.stabilized || rel_diff(rep.sym2, rep.sym2_2X) >= tol;
    rep.value = rep.A_F / (rep.h_C * rep.zeta2) * rep.S_product * rep.L_S * rep.sym2 * rep.T.value;
    return rep;
}

// ---- switching identity ----

SwitchingReport switching_check(const CoefficientSystem& sys, u64 r, cplx s, u64 X, int K) {
    require_odd_prime(r, "switching_check");
    if (!sys.has_prime(r)) throw DomainError("switching_check: no Satake data at r");
    const double rd = static_cast<double>(r);
    auto lr = local_pair(sys, r, s, K);

    cplx rest = 1.0;
    if (X >= 3)
        rest = odd_prime_product(sys, X, [&](u64 p, const Satake& g) {
            if (p == r) return cplx(1.0);
            return 1.0 + (local_pair(g, p, s, 0).L2 - 1.0) / (1.0 + 1.0 / static_cast<double>(p));
        });
    // r-factor from the coefficients a(r^{2k}) directly
    CplxSum fr;
    cplx y = npow(rd * rd, s), yp = y;
    for (int k = 1; k <= K; ++k, yp *= y) fr.add(sys.coeff_prime_power(r, 2 * k) * yp);
    cplx Fr = 1.0 + fr.value() / (1.0 + 1.0 / rd);

    SwitchingReport rep;
    rep.lhs = rest / (1.0 + 1.0 / rd);
    rep.rhs = rest * Fr / (1.0 / rd + lr.L2);
    rep.residual = rel_diff(rep.rhs, rep.lhs);
    rep.lhs_literal = weighted_square_sum(sys, s, X, r) / (1.0 + 1.0 / rd);
    rep.rhs_literal = weighted_square_sum(sys, s, X) / (1.0 / rd + lr.L2);
    rep.literal_residual = rel_diff(rep.rhs_literal, rep.lhs_literal);
    return rep;
}

// ---- Dedekind residue identity ----

DedekindReport dedekind_residue_factor_check(const ClassCharacter& rho, u64 r, u64 N, const SymbolContext& ctx,
                                             double w_sample, u64 X, u64 prime_limit) {
    if (r != 1) require_odd_prime(r, "dedekind_residue_factor_check");
    if (N == 0 || N % 2 == 0) throw DomainError("dedekind_residue_factor_check: N must be odd");
    const u64 N0 = ringarith::squarefree_split_u64(N).first;
    const u64 m = checked_mul(r, N0);
    auto in_S_or_N = [&](u64 p) { return ringarith::in_set(ctx.S, p) || N % p == 0; };
    auto chi = [&](u64 p) { return p % 2 == 0 ? 0 : rho(ctx.class_of(p)) * quadchar::chi_int(m, p); };

    DedekindReport rep;
    rep.per_prime_exact = true;
    // LHS(P) = (1 + c u) / (1 - u^2); RHS(P) = 1 / (1 - c u), or 1 / (1 - u^2) when c = 0 or P in S u {P | N}.
    // Cross-multiplied as integer polynomials in u.
    using Poly = std::array<int, 3>;
    auto mul = [](const Poly& a, const Poly& b) {
        Poly c{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; i + j < 3; ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    const Poly one{1, 0, 0}, sq{1, 0, -1};
    for (auto p : primes_up_to(prime_limit)) {
        const bool excluded = in_S_or_N(p);
        const int c = excluded ? 0 : chi(p);
        Poly num_l{1, c, 0}, den_l = sq;
        Poly num_r = one, den_r = (excluded || c == 0) ? sq : Poly{1, -c, 0};
        rep.per_prime_exact = rep.per_prime_exact && mul(num_l, den_r) == mul(num_r, den_l);
        ++rep.primes_checked;
    }

    Sieve sv(std::max<u64>(X, 2));
    cplx zeta2w = 1.0, dsum = 1.0, rhs = 1.0;
    for (auto p : sv.primes()) {
        const double u = std::pow(static_cast<double>(p), -w_sample);
        zeta2w /= 1.0 - u * u;
        if (in_S_or_N(p)) {
            rhs /= 1.0 - u * u;
            continue;
        }
        int c = chi(p);
        dsum *= 1.0 + c * u;
        rhs /= c == 0 ? 1.0 - u * u : 1.0 - c * u;
    }
    rep.lhs = zeta2w * dsum;
    rep.rhs = rhs;
    rep.euler_residual = rel_diff(rep.lhs, rep.rhs);

    rep.trivial_branch = rho.trivial() && ringarith::squarefree_split_u64(m).first == 1;
    // (w - 1) zeta(2w) sum_D at w = 1 + h: Euler product over P <= Y with the prime tail
    // sum_{P > Y} P^{-w} ~ E1((w - 1) log Y) restored on the trivial branch
    const u64 Y = 2000000;
    Sieve big(Y);
    auto sample = [&](double h) {
        const double w = 1.0 + h;
        double logsum = 0;
        for (auto p : big.primes()) {
            if (in_S_or_N(p)) continue;
            int c = chi(p);
            if (c != 0) logsum += std::log1p(c * std::pow(static_cast<double>(p), -w));
        }
        if (rep.trivial_branch) logsum += boost::math::expint(1, h * std::log(static_cast<double>(Y)));
        return h * lseries::riemann_zeta(2.0 * w).real() * std::exp(logsum);
    };
    const double h1 = 1e-3, h2 = 1e-4;
    double f1 = sample(h1), f2 = sample(h2);
    rep.limit_value = (h1 * f2 - h2 * f1) / (h1 - h2);
    rep.pole_magnitude = std::abs(f2);
    if (rep.trivial_branch) {
        double target = ctx.field.zeta_residue;
        for (u64 p : ctx.S) target /= 1.0 + 1.0 / static_cast<double>(p);
        for (auto [p, e] : factor_trial(N))
            if (!ringarith::in_set(ctx.S, p)) target /= 1.0 + 1.0 / static_cast<double>(p);
        rep.limit_target = target;
        rep.limit_rel_error = std::abs(rep.limit_value - target) / target;
    }
    bool branch_ok = rep.trivial_branch ? rep.limit_rel_error < 0.01 : rep.pole_magnitude < 1e-3;
    rep.ok = rep.per_prime_exact && rep.euler_residual < 1e-10 && branch_ok;
    return rep;
}

// ---- Hypothesis probe ----

cplx probe_factor(const Satake& g, u64 P, cplx s) {
    cplx y = npow(static_cast<double>(P), 2.0 * s);
    auto e = lseries::elementary(g);
    return (1.0 + e[0] * y) * (1.0 - g[0] * g[1] * y) * (1.0 - g[1] * g[2] * y) * (1.0 - g[2] * g[0] * y);
}

ProbeReport hypothesis_probe(const CoefficientSystem& sys, const std::vector<double>& s_grid,
                             const std::vector<u64>& X_ladder) {
    std::vector<u64> ladder = X_ladder;
    std::sort(ladder.begin(), ladder.end());
    if (!ladder.empty() && !covers(sys, ladder.back()))
        throw DomainError("hypothesis_probe: ladder beyond stored primes");
    ProbeReport rep;
    for (double s : s_grid) {
        cplx v = 1.0, prev = 0.0;
        std::size_t i = 0;
        double last_drift = INFINITY;
        for (u64 X : ladder) {
            for (; i < sys.primes().size() && sys.primes()[i] <= X; ++i) {
                u64 p = sys.primes()[i];
                if (p != 2) v *= probe_factor(sys.satake_table()[i], p, s);
            }
            ProbeRow row;
            row.s = s;
            row.X = X;
            row.value = v;
            row.drift = prev == cplx(0.0) ? INFINITY : rel_diff(prev, v);
            last_drift = row.drift;
            rep.rows.push_back(row);
            prev = v;
        }
        rep.digits.emplace_back(s, std::isfinite(last_drift) ? -std::log10(std::max(last_drift, 1e-300)) : 0.0);
    }
    return rep;
}

// ---- scattering factor ----

cplx scattering_M(const CoefficientSystem& sys, const RayClass& E, cplx s, const SymbolContext& ctx) {
    if (sys.shifts.size() != 3) throw ConfigError("scattering_M: archimedean data missing for " + sys.label);
    u64 mE = ctx.representatives.at(E.index());
    i64 d = lseries::primitive_discriminant(mE);
    auto P = lseries::gl3_twist_params(sys, d);
    auto E0 = ringarith::IdealRec::rational(mE);
    cplx eps = lseries::epsilon_factor(lseries::Degree::GL3, &sys, E0, s) /
               std::pow(static_cast<double>(mE), 3.0 * (0.5 - s));
    cplx arch = lseries::gamma_factor(P, 1.0 - s) / lseries::gamma_factor(P, s);
    cplx fin = L_S_factor(sys, E, 1.0 - s, ctx) / L_S_factor(sys, E, s, ctx);
    return eps * arch * fin;
}

// ---- residue consistency ----

ConsistencyReport residue_consistency(const CoefficientSystem& sys, const RayClass& E, u64 r, double s, u64 X,
                                      const SymbolContext& ctx) {
    if (r != 1) require_odd_prime(r, "residue_consistency");
    auto r1 = R1(sys, E, s, X, ctx);
    const double pref = r1.A_F / (r1.h_C * r1.zeta2) * r1.S_product;

    // N runs over odd N with squarefree kernel r: N = r M^2, weight prod_{P | N} (1 + 1/P)^{-1}
    Sieve sv(std::max<u64>(X, 2));
    CplxSum acc;
    for (u64 M = 1; M <= X; M += 2) {
        cplx a = 1.0;
        double w = 1.0;
        bool has_r = false;
        for (auto [p, e] : sv.factor(M)) {
            int k = 2 * e;
            if (p == r) {
                ++k;
                has_r = true;
            }
            a *= sys.coeff_prime_power(p, k);
            w /= 1.0 + 1.0 / static_cast<double>(p);
        }
        if (r != 1 && !has_r) {
            a *= sys.coeff_prime_power(r, 1);
            w /= 1.0 + 1.0 / static_cast<double>(r);
        }
        const double n = static_cast<double>(r) * static_cast<double>(M) * static_cast<double>(M);
        acc.add(a * w * std::pow(n, -s));
    }
    ConsistencyReport rep;
    const int eta = r == 1 ? 1 : class_eta(ctx, E, r);
    rep.route_sum = r1.L_S * pref * static_cast<double>(eta) * acc.value();
    if (r == 1) {
        rep.product = r1.value;
        rep.product_weighted = r1.value;
    } else {
        rep.product = r1.value * Rr(sys, E, r, s, ctx).value;
        rep.product_weighted = rep.product / (1.0 + 1.0 / static_cast<double>(r));
    }
    rep.deviation = rel_diff(rep.route_sum, rep.product);
    rep.deviation_weighted = rel_diff(rep.route_sum, rep.product_weighted);
    rep.flagged = r1.flagged;
    return rep;
}

// ---- helpers ----

Satake self_dual_triple(double a) {
    cplx c = a - 1.0;
    cplx g = (c + std::sqrt(c * c - 4.0)) / 2.0;
    return {g, 1.0, 1.0 / g};
}

CoefficientSystem perturb_coefficient(const CoefficientSystem& sys, u64 r0, double delta) {
    if (!sys.has_prime(r0)) throw DomainError("perturb_coefficient: no Satake data at " + std::to_string(r0));
    CoefficientSystem out = sys;
    double a = lseries::elementary(sys.satake(r0))[0].real();
    out.set_satake(r0, self_dual_triple(a + delta));
    out.label = sys.label + "+perturbed@" + std::to_string(r0);
    return out;
}

CoefficientSystem single_prime_system(u64 r, const Satake& g, u64 max_prime) {
    require_odd_prime(r, "single_prime_system");
    auto primes = primes_up_to(std::max(max_prime, r));
    std::vector<Satake> sat(primes.size(), Satake{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < primes.size(); ++i)
        if (primes[i] == r) sat[i] = g;
    CoefficientSystem sys("single-prime@" + std::to_string(r), std::move(primes), std::move(sat));
    sys.synthetic = true;
    sys.shifts = {0, 0, 0};
    return sys;
}

}  // namespace ddslab::residues
