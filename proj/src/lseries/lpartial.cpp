#include <cmath>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

namespace {

// Sum over primes p > X of p^{-sigma}, rough upper estimate.
double prime_tail(double sigma, u64 X) {
    if (sigma <= 1) return 0;
    double x = std::max<double>(static_cast<double>(X), 2.0);
    return std::pow(x, 1 - sigma) / ((sigma - 1) * std::log(x));
}

}  // namespace

PartialValue L_partial_gl1(const CharFn& chi, cplx w, const PrimeSet& S, u64 X) {
    cplx v = 1.0;
    for (auto p : primes_up_to(X)) {
        if (ringarith::in_set(S, p)) continue;
        int c = chi(p);
        if (c == 0) continue;
        v /= 1.0 - static_cast<double>(c) * std::pow(static_cast<double>(p), -w);
    }
    return {v, std::abs(v) * prime_tail(w.real(), X)};
}

PartialValue L_partial_gl3(const CoefficientSystem& sys, const CharFn& chi, cplx s, const PrimeSet& S, u64 X) {
    if (X > sys.max_prime()) throw DomainError("L_partial_gl3: cutoff beyond stored primes");
    cplx v = 1.0;
    for (auto p : sys.primes()) {
        if (p > X) break;
        if (ringarith::in_set(S, p)) continue;
        int c = chi(p);
        if (c == 0) continue;
        cplx x = static_cast<double>(c) * std::pow(static_cast<double>(p), -s);
        for (const auto& g : sys.satake(p)) v /= 1.0 - g * x;
    }
    return {v, std::abs(v) * 3 * prime_tail(s.real(), X)};
}

cplx epsilon_factor(Degree kind, const CoefficientSystem* sys, const IdealRec& D0, cplx point) {
    if (!D0.squarefree()) throw DomainError("epsilon_factor: D0 is not squarefree");
    double n0 = static_cast<double>(D0.norm);
    if (kind == Degree::GL1) return std::pow(n0, 0.5 - point);
    if (!sys) throw ConfigError("epsilon_factor: GL3 needs a coefficient system");
    return sys->root_number * std::pow(n0, 3.0 * (0.5 - point)) *
           std::pow(static_cast<double>(sys->conductor), 0.5 - point);
}

cplx epsilon_class_transport(const CoefficientSystem& sys, const IdealRec& D, const IdealRec& E, cplx point,
                             const quadchar::SymbolContext& ctx, int degree) {
    if (!(ctx.class_of(D) == ctx.class_of(E))) throw DomainError("epsilon_class_transport: classes differ");
    auto d0 = ringarith::squarefree_split(D).D0;
    auto e0 = ringarith::squarefree_split(E).D0;
    Degree k = degree == 1 ? Degree::GL1 : Degree::GL3;
    return epsilon_factor(k, &sys, d0, point) / epsilon_factor(k, &sys, e0, point);
}

i64 primitive_discriminant(u64 D0) {
    if (D0 % 2 == 0 || ringarith::moebius_u64(D0) == 0) throw DomainError("primitive_discriminant: D0 must be odd squarefree");
    return D0 % 4 == 1 ? static_cast<i64>(D0) : 4 * static_cast<i64>(D0);
}

i64 discriminant_for(int rho3, int rho5, u64 D0) {
    if ((rho3 != 1 && rho3 != -1) || (rho5 != 1 && rho5 != -1)) throw DomainError("discriminant_for: rho values must be +-1");
    if (D0 % 2 == 0 || ringarith::moebius_u64(D0) == 0) throw DomainError("discriminant_for: D0 must be odd squarefree");
    // characters mod 8 by their values on 3 and 5, as discriminants 1, -4, 8, -8
    auto disc8 = [](int v3, int v5) -> i64 {
        if (v3 == 1 && v5 == 1) return 1;
        if (v3 == -1 && v5 == 1) return -4;
        if (v3 == -1 && v5 == -1) return 8;
        return -8;
    };
    i64 d0 = static_cast<i64>(D0);
    if (D0 % 4 == 1) return disc8(rho3, rho5) * d0;
    // (D0/n) = chi_{-4}(n) (-D0/n) on odd n
    return disc8(-rho3, rho5) * -d0;
}

}  // namespace ddslab::lseries
