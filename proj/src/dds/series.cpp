#include <algorithm>
#include <cmath>
#include <limits>

#include "ddslab/dds.hpp"

namespace ddslab::dds {

void TruncationSpec::validate() const {
    if (X_D < 1 || X_N < 1) throw ConfigError("truncation cutoffs must be at least 1");
    if (!(tolerance > 0)) throw ConfigError("truncation tolerance must be positive");
}

const char* order_name(Order o) { return o == Order::DFirst ? "D-first" : "N-first"; }

// ---- twists ----

Twist Twist::trivial(const SymbolContext& ctx) { return Twist{std::vector<cplx>(ctx.h_C, 1.0), 1}; }

Twist Twist::character(const ClassCharacter& rho, const SymbolContext& ctx, u64 quad) {
    Twist t;
    t.quad = quad;
    for (int i = 0; i < ctx.h_C; ++i) t.cls.push_back(rho(quadchar::RayClass::from_index(i, ctx.k())));
    return t;
}

Twist Twist::delta(const quadchar::RayClass& E, const SymbolContext& ctx) {
    Twist t{std::vector<cplx>(ctx.h_C, 0.0), 1};
    t.cls[E.index()] = 1.0;
    return t;
}

Twist Twist::times(const Twist& o) const {
    if (cls.size() != o.cls.size()) throw DomainError("Twist::times: class counts differ");
    Twist t;
    for (std::size_t i = 0; i < cls.size(); ++i) t.cls.push_back(cls[i] * o.cls[i]);
    t.quad = checked_mul(quad, o.quad);
    return t;
}

bool Twist::multiplicative() const {
    if (cls.empty() || cls[0] != cplx(1.0)) return false;
    for (auto v : cls)
        if (v != cplx(1.0) && v != cplx(-1.0)) return false;
    // values on a 2-group: multiplicative iff closed under the group law on indices
    for (std::size_t i = 0; i < cls.size(); ++i)
        for (std::size_t j = 0; j < cls.size(); ++j)
            if (cls[i ^ j] != cls[i] * cls[j]) return false;
    return true;
}

namespace {

struct ClassTable {
    std::array<int, 8> idx{};
    explicit ClassTable(const SymbolContext& ctx) {
        for (u64 r = 1; r < 8; r += 2) idx[r] = ctx.class_of(r).index();
    }
    int operator()(u64 n) const { return idx[n % 8]; }
};

cplx twist_at(const Twist& t, const ClassTable& ct, u64 n) {
    cplx v = t.cls[ct(n)];
    if (t.quad != 1) v *= static_cast<double>(jacobi(static_cast<i64>(t.quad), n));
    return v;
}

bool in_extra(const std::vector<u64>& S, u64 p) { return std::find(S.begin(), S.end(), p) != S.end(); }

bool coprime_to_extra(const std::vector<u64>& S, u64 n) {
    for (auto p : S)
        if (n % p == 0) return false;
    return true;
}

bool is_power_of(u64 n, u64 p) {
    while (n % p == 0) n /= p;
    return n == 1;
}

// Squarefree kernel and square part for 1..n from the smallest-prime-factor table.
struct SplitTable {
    std::vector<std::uint32_t> d0, d1;
    SplitTable(const Sieve& sv, u64 n) : d0(n + 1, 1), d1(n + 1, 1) {
        for (u64 m = 2; m <= n; ++m) {
            u64 p = sv.spf(m), q = m / p;
            if (q % p == 0) {
                d0[m] = d0[q / p];
                d1[m] = static_cast<std::uint32_t>(d1[q / p] * p);
            } else {
                d0[m] = static_cast<std::uint32_t>(d0[q] * p);
                d1[m] = d1[q];
            }
        }
    }
};

// Completely multiplicative extension to odd m <= n of values given on primes.
template <class T>
void fill_multiplicative(std::vector<T>& f, const Sieve& sv, u64 n, const std::vector<T>& at_prime) {
    f.assign(n + 1, T(0));
    if (n >= 1) f[1] = T(1);
    for (u64 m = 3; m <= n; m += 2) {
        u64 p = sv.spf(m);
        f[m] = at_prime[p] * f[m / p];
    }
}

double zeta_bound(double sigma) { return sigma > 1 ? 1.0 + 1.0 / (sigma - 1.0) : std::numeric_limits<double>::infinity(); }

// Rough bound for sum_{n > X} d_3(n) n^{-sigma}.
double d3_tail(double sigma, u64 X) {
    if (sigma <= 1) return std::numeric_limits<double>::infinity();
    double x = std::max<double>(static_cast<double>(X), 3.0), a = sigma - 1.0, lx = std::log(x);
    return std::pow(x, -a) / a * (0.5 * lx * lx + lx / a + 1.0 / (a * a));
}

double one_tail(double sigma, u64 X) {
    if (sigma <= 1) return std::numeric_limits<double>::infinity();
    return std::pow(static_cast<double>(std::max<u64>(X, 1)), 1.0 - sigma) / (sigma - 1.0);
}

double series_tail(cplx s, cplx w, u64 X_D, u64 X_N, double scale, bool euler) {
    double zs = zeta_bound(s.real()), zw = zeta_bound(w.real());
    double n_tail = euler ? 3.0 * one_tail(s.real(), X_N) / std::log(std::max<double>(X_N, 3.0)) * zs * zs * zs
                          : d3_tail(s.real(), X_N);
    return scale * (zw * n_tail + zs * zs * zs * one_tail(w.real(), X_D));
}

void finish(DDSValue& v, cplx s, cplx w, const TruncationSpec& t, double scale, bool euler) {
    v.tail = series_tail(s, w, t.X_D, t.X_N, scale, euler);
    v.partial = !(v.tail <= t.tolerance);
}

}  // namespace

CoeffTable coefficient_table(const CoefficientSystem& sys, u64 n) { return sys.coefficient_table(n); }

// ---- pure series ----

DDSValue Z_pure(cplx s, cplx w, const CoeffTable& a, const SymbolContext& ctx, const TruncationSpec& t) {
    t.validate();
    if (a.size() <= t.X_N) throw DomainError("Z_pure: coefficient table shorter than X_N");
    const u64 XD = t.X_D, XN = t.X_N, lim = std::max(XD, XN);
    Sieve sv(std::max<u64>(lim, 3));
    SplitTable sp(sv, lim);
    ClassTable ct(ctx);

    std::vector<cplx> tn(XN + 1, 0.0);
    for (u64 n = 1; n <= XN; n += 2) tn[n] = a[n] * std::exp(-s * std::log(static_cast<double>(n)));
    std::vector<cplx> dw(XD + 1, 0.0);
    for (u64 d = 1; d <= XD; d += 2) dw[d] = std::exp(-w * std::log(static_cast<double>(d)));

    DDSValue out;
    CplxSum total;
    std::vector<int> chip(lim + 1, 0), chi;
    if (t.order == Order::DFirst) {
        // chi_D(N) = (D0 / N), completely multiplicative in N
        for (u64 d = 1; d <= XD; d += 2) {
            i64 d0 = sp.d0[d];
            for (auto p : sv.primes())
                if (p > 2 && p <= XN) chip[p] = jacobi(d0, p);
            fill_multiplicative(chi, sv, XN, chip);
            CplxSum inner;
            for (u64 n = 1; n <= XN; n += 2)
                if (chi[n]) inner.add(static_cast<double>(chi[n]) * tn[n]);
            cplx term = dw[d] * inner.value();
            total.add(term);
            out.last_term = std::abs(term);
            ++out.terms;
        }
    } else {
        // chi_D(N) = eta([D0],[N0]) (N0 / D0) [gcd(D0, N1) = 1]
        std::array<std::array<int, 4>, 4> eta{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                eta[i][j] = ctx.eta[i][j];
        std::vector<int> cls_d0(XD + 1, 0);
        for (u64 d = 1; d <= XD; d += 2) cls_d0[d] = ct(sp.d0[d]);
        for (u64 n = 1; n <= XN; n += 2) {
            if (tn[n] == cplx(0.0)) continue;
            u64 n0 = sp.d0[n], n1 = sp.d1[n];
            for (auto p : sv.primes())
                if (p > 2 && p <= XD) chip[p] = (n1 % p == 0) ? 0 : jacobi(static_cast<i64>(n0), p);
            fill_multiplicative(chi, sv, XD, chip);
            const auto& row = eta[ct(n0)];
            CplxSum inner;
            for (u64 d = 1; d <= XD; d += 2) {
                int c = chi[sp.d0[d]];
                if (c) inner.add(static_cast<double>(c * row[cls_d0[d]]) * dw[d]);
            }
            cplx term = tn[n] * inner.value();
            total.add(term);
            ++out.terms;
        }
        // report the D-cutoff term magnitude in the same units as the D-first order
        out.last_term = std::abs(dw[XD % 2 ? XD : XD - 1]);
    }
    out.value = total.value();
    finish(out, s, w, t, 1.0, false);
    return out;
}

DDSValue Z_pure(cplx s, cplx w, const CoefficientSystem& sys, const SymbolContext& ctx, const TruncationSpec& t) {
    return Z_pure(s, w, sys.coefficient_table(t.X_N), ctx, t);
}

// ---- D-side evaluator ----

namespace {

struct DTerm {
    u64 e;
    cplx c;
};

// Expansion of a(s, D, alpha) as sum_e c_e e^{-s}, terms with e <= cutoff.
std::vector<DTerm> a_expansion(u64 D, const Twist& alpha, const ClassTable& ct, const CorrectionCache& cc,
                               u64 cutoff) {
    std::vector<DTerm> terms{{1, 1.0}};
    for (auto [p, k] : factor_trial(D)) {
        if (k < 2) continue;
        auto lc = cc.get(p);
        if (k >= static_cast<int>(lc->A.size()))
            throw DomainError("correction solver unavailable for " + std::to_string(p) + "^" + std::to_string(k));
        u64 pk = ipow(p, static_cast<unsigned>(k));
        double eps = twist_at(alpha, ct, p).real() * jacobi(static_cast<i64>(D / pk), p);
        const auto& poly = lc->A[k];
        std::vector<DTerm> next;
        for (const auto& tm : terms) {
            u64 e = tm.e;
            double sign = 1.0;
            for (std::size_t j = 0; j < poly.size(); ++j) {
                if (j > 0) {
                    if (e > cutoff / p) break;
                    e *= p;
                    sign *= eps;
                }
                if (poly[j] != cplx(0.0)) next.push_back({e, tm.c * poly[j] * sign});
            }
        }
        terms = std::move(next);
    }
    return terms;
}

bool d_allowed(u64 D, const SeriesRequest& req, const SplitTable& sp) {
    if (!req.extra_S.empty() && !coprime_to_extra(req.extra_S, D)) return false;
    if (req.support_prime && !is_power_of(D, req.support_prime)) return false;
    switch (req.restrict) {
        case DRestrict::None: return true;
        case DRestrict::Squarefree: return sp.d1[D] == 1;
        case DRestrict::RDividesD1: return sp.d1[D] % req.r == 0;
        case DRestrict::D1CoprimeTo: return gcd_u64(sp.d1[D], req.r) == 1;
    }
    return true;
}

void check_request(const SeriesRequest& req, const SymbolContext& ctx) {
    if (static_cast<int>(req.alpha.cls.size()) != ctx.h_C || static_cast<int>(req.beta.cls.size()) != ctx.h_C)
        throw ConfigError("twist size does not match the class group");
    if (!req.alpha.multiplicative()) throw DomainError("alpha must be a character of H_C");
    if (req.alpha.quad % 2 == 0 || req.beta.quad % 2 == 0) throw DomainError("quadratic twists must be odd");
    if (req.restrict != DRestrict::None) {
        if (req.r % 2 == 0 || ringarith::moebius_u64(req.r) == 0)
            throw DomainError("restriction ideal " + std::to_string(req.r) + " must be odd and squarefree");
        if (!req.extra_S.empty() && !coprime_to_extra(req.extra_S, req.r))
            throw DomainError("restriction ideal must be prime to S");
    }
    for (auto p : req.extra_S)
        if (p % 2 == 0 || !is_prime_u64(p)) throw DomainError("extra S entries must be odd primes");
}

}  // namespace

cplx a_factor(cplx s, u64 D, const Twist& alpha, const CorrectionCache& cc, const SymbolContext& ctx) {
    if (D % 2 == 0) throw DomainError("a_factor: D must be odd");
    ClassTable ct(ctx);
    cplx v = 1.0;
    for (auto [p, k] : factor_trial(D)) {
        if (k < 2) continue;
        auto lc = cc.get(p);
        u64 pk = ipow(p, static_cast<unsigned>(k));
        double eps = twist_at(alpha, ct, p).real() * jacobi(static_cast<i64>(D / pk), p);
        v *= lc->a_value(k, eps * std::pow(static_cast<double>(p), -s));
    }
    return v;
}

cplx b_factor(cplx w, u64 M, const Twist& beta, const CorrectionCache& cc, const SymbolContext& ctx) {
    if (M % 2 == 0) throw DomainError("b_factor: M must be odd");
    ClassTable ct(ctx);
    cplx v = 1.0;
    for (auto [q, l] : factor_trial(M)) {
        auto lc = cc.get(q);
        u64 ql = ipow(q, static_cast<unsigned>(l));
        double eps = twist_at(beta, ct, q).real() * jacobi(static_cast<i64>(M / ql), q);
        v *= lc->b_value(l, eps * std::pow(static_cast<double>(q), -w));
    }
    return v;
}

DDSValue corrected_Z(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                     const SymbolContext& ctx, const TruncationSpec& t) {
    t.validate();
    check_request(req, ctx);
    const bool euler = t.inner == InnerSum::Euler;
    const u64 XD = t.X_D, XN = t.X_N, lim = std::max(XD, XN);
    if (XN > sys.max_prime()) throw DomainError("corrected_Z: X_N beyond stored primes");
    Sieve sv(std::max<u64>(lim, 3));
    SplitTable sp(sv, lim);
    ClassTable ct(ctx);
    const cplx s = req.s, w = req.w;

    // per-prime data: alpha(p) and its exclusion
    std::vector<double> alpha_p(lim + 1, 0.0);
    for (auto p : sv.primes()) {
        if (p == 2) continue;
        if (in_extra(req.extra_S, p)) continue;
        if (req.support_prime && p != req.support_prime) continue;
        alpha_p[p] = twist_at(req.alpha, ct, p).real();
    }

    std::vector<cplx> tn;
    std::vector<std::uint32_t> eprimes;
    std::vector<cplx> lp_plus, lp_minus;
    if (euler) {
        for (auto p : sv.primes()) {
            if (p == 2 || p > XN || alpha_p[p] == 0.0) continue;
            cplx x = std::pow(static_cast<double>(p), -s);
            cplx fp = 1.0, fm = 1.0;
            for (const auto& g : sys.satake(p)) {
                fp /= 1.0 - g * x;
                fm /= 1.0 + g * x;
            }
            eprimes.push_back(p);
            lp_plus.push_back(fp);
            lp_minus.push_back(fm);
        }
    } else {
        auto a = sys.coefficient_table(XN);
        tn.assign(XN + 1, 0.0);
        for (u64 n = 1; n <= XN; n += 2) tn[n] = a[n] * std::exp(-s * std::log(static_cast<double>(n)));
    }

    DDSValue out;
    CplxSum total;
    double amax = 1.0;
    std::vector<double> chip(lim + 1, 0.0), chi;
    std::vector<cplx> prefix;
    for (u64 D = 1; D <= XD; D += 2) {
        if (!d_allowed(D, req, sp)) continue;
        cplx beta = twist_at(req.beta, ct, D);
        if (beta == cplx(0.0)) continue;
        i64 d0 = sp.d0[D];
        cplx body;
        if (euler) {
            cplx L = 1.0;
            for (std::size_t i = 0; i < eprimes.size(); ++i) {
                int c = jacobi(d0, eprimes[i]) * static_cast<int>(alpha_p[eprimes[i]]);
                if (c > 0) L *= lp_plus[i];
                else if (c < 0) L *= lp_minus[i];
            }
            cplx av = req.corrected ? a_factor(s, D, req.alpha, cc, ctx) : cplx(1.0);
            amax = std::max(amax, std::abs(av));
            body = av * L;
        } else {
            for (auto p : sv.primes())
                if (p > 2 && p <= XN) chip[p] = alpha_p[p] * jacobi(d0, p);
            fill_multiplicative(chi, sv, XN, chip);
            prefix.assign(XN + 1, 0.0);
            CplxSum run;
            for (u64 n = 1; n <= XN; ++n) {
                if (n % 2 == 1 && chi[n] != 0.0) run.add(chi[n] * tn[n]);
                prefix[n] = run.value();
            }
            if (req.corrected && sp.d1[D] > 1) {
                CplxSum acc;
                for (const auto& tm : a_expansion(D, req.alpha, ct, cc, XN))
                    acc.add(tm.c * std::exp(-s * std::log(static_cast<double>(tm.e))) * prefix[XN / tm.e]);
                body = acc.value();
            } else {
                body = prefix[XN];
            }
        }
        cplx term = beta * std::exp(-w * std::log(static_cast<double>(D))) * body;
        total.add(term);
        out.last_term = std::abs(term);
        ++out.terms;
    }
    out.value = total.value();
    finish(out, s, w, t, amax, euler);
    return out;
}

DDSValue corrected_Z_M(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                       const SymbolContext& ctx, const TruncationSpec& t) {
    t.validate();
    check_request(req, ctx);
    if (!req.beta.multiplicative()) throw DomainError("M-side: beta must be a character of H_C");
    if (req.restrict != DRestrict::None) throw DomainError("M-side: D restrictions are not available");
    if (t.inner != InnerSum::Dirichlet) throw DomainError("M-side: box truncation only");
    const u64 XD = t.X_D, XN = t.X_N, lim = std::max(XD, XN);
    if (XN > sys.max_prime()) throw DomainError("corrected_Z_M: X_N beyond stored primes");
    Sieve sv(std::max<u64>(lim, 3));
    SplitTable sp(sv, lim);
    ClassTable ct(ctx);
    const cplx s = req.s, w = req.w;

    auto usable = [&](u64 p) {
        return p != 2 && !in_extra(req.extra_S, p) && (!req.support_prime || p == req.support_prime);
    };
    std::vector<double> beta_p(lim + 1, 0.0);
    for (auto p : sv.primes())
        if (usable(p)) beta_p[p] = twist_at(req.beta, ct, p).real();
    std::vector<cplx> kw(XD + 1, 0.0);
    for (u64 k = 1; k <= XD; k += 2) kw[k] = std::exp(-w * std::log(static_cast<double>(k)));
    // class index of a product from the indices of the factors
    std::array<std::array<int, 4>, 4> mul{};
    std::array<u64, 4> rep{};
    for (u64 r = 1; r < 8; r += 2) rep[ct(r)] = r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mul[i][j] = ct(rep[i] * rep[j]);

    DDSValue out;
    CplxSum total;
    std::vector<double> chip(lim + 1, 0.0), chi;
    std::array<std::vector<cplx>, 4> prefix;
    for (u64 M = 1; M <= XN; M += 2) {
        if (!req.extra_S.empty() && !coprime_to_extra(req.extra_S, M)) continue;
        if (req.support_prime && !is_power_of(M, req.support_prime)) continue;
        cplx am = twist_at(req.alpha, ct, M);
        i64 m0 = sp.d0[M];
        for (auto p : sv.primes())
            if (p > 2 && p <= XD) chip[p] = beta_p[p] * jacobi(m0, p);
        fill_multiplicative(chi, sv, XD, chip);
        std::array<CplxSum, 4> run;
        for (auto& v : prefix) v.assign(XD + 1, 0.0);
        for (u64 k = 1; k <= XD; ++k) {
            if (k % 2 == 1 && chi[k] != 0.0) run[ct(k)].add(chi[k] * kw[k]);
            for (int c = 0; c < 4; ++c) prefix[c][k] = run[c].value();
        }
        // b(w, M, beta) = sum_f c_f f^{-w}
        std::vector<DTerm> bt{{1, 1.0}};
        for (auto [q, l] : factor_trial(M)) {
            auto lc = cc.get(q);
            if (l >= static_cast<int>(lc->B.size()))
                throw DomainError("correction solver unavailable for " + std::to_string(q) + "^" + std::to_string(l));
            u64 ql = ipow(q, static_cast<unsigned>(l));
            double eps = beta_p[q] * jacobi(static_cast<i64>(M / ql), q);
            const auto& poly = lc->B[l];
            std::vector<DTerm> next;
            for (const auto& tm : bt) {
                u64 f = tm.e;
                double sign = 1.0;
                for (std::size_t j = 0; j < poly.size(); ++j) {
                    if (j > 0) {
                        if (f > XD / q) break;
                        f *= q;
                        sign *= eps;
                    }
                    if (poly[j] != cplx(0.0)) next.push_back({f, tm.c * poly[j] * sign});
                }
            }
            bt = std::move(next);
        }
        int cm = ct(M);
        CplxSum inner;
        for (const auto& tm : bt) {
            u64 cap = XD / tm.e;
            if (cap == 0) continue;
            int cf = ct(tm.e);
            cplx acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += static_cast<double>(ctx.eta[mul[c][cf]][cm]) * prefix[c][cap];
            inner.add(tm.c * kw[tm.e] * acc);
        }
        cplx term = am * std::exp(-s * std::log(static_cast<double>(M))) * inner.value();
        total.add(term);
        out.last_term = std::abs(term);
        ++out.terms;
    }
    out.value = total.value();
    finish(out, s, w, t, 1.0, false);
    return out;
}

DDSValue Z_star(cplx s, cplx w, const CoefficientSystem& sys, const SymbolContext& ctx, const Twist& alpha,
                const Twist& beta, const TruncationSpec& t) {
    SeriesRequest req;
    req.s = s;
    req.w = w;
    req.alpha = alpha;
    req.beta = beta;
    req.corrected = false;
    req.restrict = DRestrict::Squarefree;
    CorrectionCache unused(sys);
    return corrected_Z(req, sys, unused, ctx, t);
}

namespace {

SeriesRequest restricted(cplx s, cplx w, const SymbolContext& ctx, DRestrict kind, u64 r, const Twist* alpha,
                         const Twist* beta) {
    SeriesRequest req;
    req.s = s;
    req.w = w;
    req.alpha = alpha ? *alpha : Twist::trivial(ctx);
    req.beta = beta ? *beta : Twist::trivial(ctx);
    req.restrict = kind;
    req.r = r;
    return req;
}

}  // namespace

DDSValue Z_r(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc, const SymbolContext& ctx,
             u64 r, const TruncationSpec& t, const Twist* alpha, const Twist* beta) {
    return corrected_Z(restricted(s, w, ctx, DRestrict::RDividesD1, r, alpha, beta), sys, cc, ctx, t);
}

DDSValue Z_paren_l(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc, const SymbolContext& ctx,
                   u64 l, const TruncationSpec& t, const Twist* alpha, const Twist* beta) {
    return corrected_Z(restricted(s, w, ctx, DRestrict::D1CoprimeTo, l, alpha, beta), sys, cc, ctx, t);
}

}  // namespace ddslab::dds
