#include <cmath>

#include "ddslab/dds.hpp"

namespace ddslab::dds {

namespace {

std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (auto [p, e] : factor_trial(n)) out.push_back(p);
    return out;
}

std::vector<u64> divisors_squarefree(const std::vector<u64>& primes) {
    std::vector<u64> out{1};
    for (auto p : primes) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * p);
    }
    return out;
}

void require_odd_squarefree(u64 r, const char* who) {
    if (r == 0 || r % 2 == 0 || ringarith::moebius_u64(r) == 0)
        throw DomainError(std::string(who) + ": " + std::to_string(r) + " must be odd and squarefree");
}

double rel_residual(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

int class_value(const ClassCharacter& chi, const SymbolContext& ctx, u64 n) { return chi(ctx.class_of(n)); }

}  // namespace

// ---- exact sieve identities ----

SieveCheck sieve_identity_check(const IdealFunction& f, u64 r) {
    if (r == 0 || ringarith::moebius_u64(r) == 0) throw DomainError("sieve_identity_check: r must be squarefree");
    SieveCheck out;
    u64 maxD = 0;
    for (auto& [D, v] : f) {
        if (D == 0) throw DomainError("sieve_identity_check: ideal norms start at 1");
        maxD = std::max(maxD, D);
        if (ringarith::moebius_u64(D) != 0) out.squarefree_rhs += v;
    }
    auto d1_of = [](u64 D) { return ringarith::squarefree_split_u64(D).second; };
    // sum over r' with r'^2 <= max D suffices: larger r' divide no D1
    for (u64 rr = 1; rr * rr <= maxD; ++rr) {
        int mu = ringarith::moebius_u64(rr);
        if (mu == 0) continue;
        Rational inner = 0;
        for (auto& [D, v] : f)
            if (d1_of(D) % rr == 0) inner += v;
        out.mobius_lhs += mu * inner;
    }
    for (auto& [D, v] : f)
        if (d1_of(D) % r == 0) out.zr_lhs += v;
    for (auto l : divisors_squarefree(prime_factors(r))) {
        Rational inner = 0;
        for (auto& [D, v] : f)
            if (gcd_u64(d1_of(D), l) == 1) inner += v;
        out.zl_rhs += ringarith::moebius_u64(l) * inner;
    }
    out.ok = out.mobius_lhs == out.squarefree_rhs && out.zr_lhs == out.zl_rhs;
    return out;
}

// ---- basic identity and the Z_(l) expansion ----

IdentityCheck basic_identity_check(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                                   const SymbolContext& ctx, const TruncationSpec& t, double tol) {
    IdentityCheck out;
    out.lhs = corrected_Z(req, sys, cc, ctx, t).value;
    out.rhs = corrected_Z_M(req, sys, cc, ctx, t).value;
    out.residual = rel_residual(out.lhs, out.rhs);
    out.ok = out.residual < tol;
    return out;
}

IdentityCheck zl_expansion_check(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc,
                                 const SymbolContext& ctx, u64 l, const Twist& alpha, const Twist& beta,
                                 const TruncationSpec& t, double tol) {
    require_odd_squarefree(l, "zl_expansion_check");
    if (!beta.multiplicative()) throw DomainError("zl_expansion_check: beta must be a character");
    TruncationSpec te = t;
    te.inner = InnerSum::Euler;
    auto lp = prime_factors(l);
    for (auto p : lp)
        if (p > te.X_N) throw DomainError("zl_expansion_check: prime cutoff below the primes of l");

    auto twist_val = [&](const Twist& tw, u64 n) {
        cplx v = tw.cls[ctx.class_of(n).index()];
        if (tw.quad != 1) v *= static_cast<double>(jacobi(static_cast<i64>(tw.quad), n));
        return v;
    };
    auto square_factor = [&](u64 n) {
        cplx v = 1.0;
        cplx x2 = std::pow(static_cast<double>(n), -2.0 * s);
        for (const auto& g : sys.satake(n)) v *= 1.0 - g * g * x2;
        return v;
    };

    IdentityCheck out;
    cplx mult = 1.0;
    for (auto p : lp) mult *= square_factor(p);
    out.lhs = mult * Z_paren_l(s, w, sys, cc, ctx, l, te, &alpha, &beta).value;

    CplxSum rhs;
    for (auto l3 : divisors_squarefree(lp)) {
        cplx pre = std::pow(static_cast<double>(l3), -w) * twist_val(beta, l3);
        for (auto p : prime_factors(l3)) pre *= square_factor(p);
        auto rest = divisors_squarefree(prime_factors(l / l3));
        // coefficients of the m-expansion, grouped by m = m1 m2 m3
        std::map<u64, cplx> coef;
        for (auto m1 : rest)
            for (auto m2 : rest)
                for (auto m3 : rest) {
                    std::array<u64, 3> mj{m1, m2, m3};
                    u64 m = m1 * m2 * m3;
                    cplx c = twist_val(alpha, m) * static_cast<double>(jacobi(static_cast<i64>(l3), m)) *
                             std::pow(static_cast<double>(m), -s);
                    for (int j = 0; j < 3; ++j)
                        for (auto p : prime_factors(mj[j])) c *= sys.satake(p)[j];
                    coef[m] += c;
                }
        Twist alpha_l3 = alpha;
        alpha_l3.quad = checked_mul(alpha.quad, l3);
        TruncationSpec tl = te;
        tl.X_D = te.X_D / l3;
        if (tl.X_D < 1) continue;
        for (auto& [m, c] : coef) {
            for (int e = 0; e < ctx.h_C; ++e) {
                auto E = quadchar::RayClass::from_index(e, ctx.k());
                SeriesRequest req;
                req.s = s;
                req.w = w;
                req.alpha = alpha_l3;
                req.beta = beta.times(Twist::delta(E, ctx));
                req.beta.quad = checked_mul(req.beta.quad, m);
                req.extra_S = lp;
                int eta = quadchar::eta(E, ctx.class_of(m), ctx);
                rhs.add(pre * c * static_cast<double>(eta) * corrected_Z(req, sys, cc, ctx, tl).value);
            }
        }
    }
    out.rhs = rhs.value();
    out.residual = rel_residual(out.lhs, out.rhs);
    out.ok = out.residual < tol;
    return out;
}

// ---- refined functional equations ----

RefinedExpansion refined_fe_expand(u64 r, const ClassCharacter& chi, Side side, const SymbolContext& ctx) {
    require_odd_squarefree(r, "refined_fe_expand");
    RefinedExpansion ex;
    ex.side = side;
    ex.r = r;
    // the conductor of a character of H_C is supported on the finite primes of S
    ex.f_r = 1;
    if (!chi.trivial())
        for (auto p : ctx.S)
            if (r % p == 0) ex.f_r *= p;
    ex.primes = prime_factors(r / ex.f_r);
    auto divs = divisors_squarefree(ex.primes);
    if (side == Side::Psi) {
        for (auto l : divs)
            for (auto m : divs) {
                RefinedTerm t;
                t.l[0] = l;
                t.m[0] = m;
                t.twist = l * m;
                ex.terms.push_back(t);
            }
    } else {
        std::size_t d = divs.size();
        std::size_t total = d * d * d * d * d * d;
        for (std::size_t idx = 0; idx < total; ++idx) {
            RefinedTerm t;
            std::size_t v = idx;
            for (int j = 0; j < 3; ++j) {
                t.l[j] = divs[v % d];
                v /= d;
            }
            for (int j = 0; j < 3; ++j) {
                t.m[j] = divs[v % d];
                v /= d;
            }
            t.twist = 1;
            for (int j = 0; j < 3; ++j) t.twist *= t.l[j] * t.m[j];
            ex.terms.push_back(t);
        }
    }
    return ex;
}

cplx RefinedExpansion::coefficient(const RefinedTerm& t, cplx z, const std::function<int(u64)>& chi_val,
                                   const std::function<Satake(u64)>& gamma) const {
    auto char_of = [&](u64 n) {
        double v = 1.0;
        for (auto p : prime_factors(n)) v *= chi_val(p);
        return v;
    };
    if (side == Side::Psi) {
        u64 l = t.l[0], m = t.m[0];
        return static_cast<double>(ringarith::moebius_u64(l)) * char_of(l) * std::pow(static_cast<double>(l), -z) *
               char_of(m) * std::pow(static_cast<double>(m), z - 1.0);
    }
    cplx c = 1.0;
    for (int j = 0; j < 3; ++j) {
        cplx gl = 1.0, gm = 1.0;
        for (auto p : prime_factors(t.l[j])) gl *= gamma(p)[j];
        for (auto p : prime_factors(t.m[j])) gm *= gamma(p)[j];
        c *= char_of(t.l[j]) * gl * std::pow(static_cast<double>(t.l[j]), z - 1.0);
        c *= static_cast<double>(ringarith::moebius_u64(t.m[j])) * char_of(t.m[j]) * gm *
             std::pow(static_cast<double>(t.m[j]), -z);
    }
    return c;
}

cplx RefinedExpansion::evaluate(cplx z, const std::function<int(u64)>& chi_val,
                                const std::function<Satake(u64)>& gamma,
                                const std::function<int(u64)>& chi_D) const {
    CplxSum acc;
    for (const auto& t : terms) {
        double sign = 1.0;
        for (int j = 0; j < 3; ++j)
            for (u64 n : {t.l[j], t.m[j]})
                for (auto p : prime_factors(n)) sign *= chi_D(p);
        if (sign != 0.0) acc.add(sign * coefficient(t, z, chi_val, gamma));
    }
    return acc.value();
}

cplx RefinedExpansion::closed_form(cplx z, const std::function<int(u64)>& chi_val,
                                   const std::function<Satake(u64)>& gamma,
                                   const std::function<int(u64)>& chi_D) const {
    cplx v = 1.0;
    for (auto p : primes) {
        double P = static_cast<double>(p);
        double c = chi_val(p) * chi_D(p);
        if (side == Side::Psi) {
            double b = chi_val(p);
            v *= (1.0 - b * b * std::pow(P, 2.0 * z - 2.0)) * (1.0 - c * std::pow(P, -z)) /
                 (1.0 - c * std::pow(P, z - 1.0));
        } else {
            for (const auto& g : gamma(p)) {
                v *= (1.0 - g * g * std::pow(P, 2.0 * z - 2.0)) * (1.0 - c * g * std::pow(P, -z)) /
                     (1.0 - c * g * std::pow(P, z - 1.0));
            }
        }
    }
    return v;
}

// ---- termwise functional equations ----

FeTermResult fe_termwise_check(const FeTerm& term, cplx point, const CoefficientSystem* sys,
                               const CorrectionCache* cc, const SymbolContext& ctx, double tol) {
    if (term.n == 0 || term.n % 2 == 0) throw DomainError("fe_termwise_check: the ideal must be odd");
    if (term.degree != 1 && term.degree != 3) throw DomainError("fe_termwise_check: degree must be 1 or 3");
    if (!sys) throw ConfigError("fe_termwise_check: needs a coefficient system");
    auto [n0, n1] = ringarith::squarefree_split_u64(term.n);
    int rho3 = class_value(term.chi, ctx, 3), rho5 = class_value(term.chi, ctx, 5);
    i64 d = lseries::discriminant_for(rho3, rho5, n0);
    Twist tw = Twist::character(term.chi, ctx);
    const double n1d = static_cast<double>(n1);

    lseries::CompletedLParams P;
    lseries::CoeffFn a;
    std::function<cplx(cplx)> local2, corr;
    double n1_exp;
    if (term.degree == 1) {
        P = lseries::gl1_params(d);
        a = [d](u64 n) { return cplx(kronecker(d, n)); };
        int c2 = kronecker(d, 2);
        local2 = [c2](cplx z) { return 1.0 / (1.0 - static_cast<double>(c2) * std::pow(2.0, -z)); };
        corr = [&](cplx z) { return cc ? b_factor(z, term.n, tw, *cc, ctx) : cplx(1.0); };
        n1_exp = 2.0;  // |M1|^{1 - 2w}
    } else {
        P = lseries::gl3_twist_params(*sys, d);
        a = [sys, d](u64 n) { return sys->coeff(n) * static_cast<double>(kronecker(d, n)); };
        int c2 = kronecker(d, 2);
        local2 = [sys, c2](cplx z) { return lseries::remove_two_factor(*sys, c2, z, 1.0); };
        local2 = [f = local2](cplx z) { return 1.0 / f(z); };
        corr = [&](cplx z) { return cc ? a_factor(z, term.n, tw, *cc, ctx) : cplx(1.0); };
        n1_exp = 6.0;  // |D1|^{6(1/2 - s)}
    }
    if (n1 > 1 && !cc) throw ConfigError("fe_termwise_check: non-squarefree term needs correction factors");

    // the two sides use different smoothings so that agreement is not automatic
    lseries::AfeOptions unit, gauss;
    gauss.smoothing = lseries::Smoothing{lseries::Smoothing::Gaussian, 8.0 * P.degree * P.degree};
    gauss.cutoff_scale = 3.0;
    auto LS = [&](cplx z, const lseries::AfeOptions& o) { return lseries::lvalue(P, a, z, o).L / local2(z); };
    cplx z = point, zr = 1.0 - point;
    FeTermResult out;
    out.lhs = LS(z, unit) * corr(z);
    cplx factor = P.root_number * std::pow(P.conductor, 0.5 - z) * lseries::gamma_factor(P, zr) /
                  lseries::gamma_factor(P, z) * local2(zr) / local2(z) * std::pow(n1d, n1_exp * (0.5 - z));
    out.rhs = LS(zr, gauss) * corr(zr) * factor;
    out.residual = rel_residual(out.lhs, out.rhs);
    out.flagged = !(out.residual < tol);
    return out;
}

}  // namespace ddslab::dds
