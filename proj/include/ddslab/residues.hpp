#pragma once

#include <string>
#include <vector>

#include "ddslab/lseries.hpp"
#include "ddslab/quadchar.hpp"

namespace ddslab::residues {

using lseries::CoefficientSystem;
using lseries::Satake;
using quadchar::ClassCharacter;
using quadchar::RayClass;
using quadchar::SymbolContext;

// ---- local series at a prime r ----

struct LocalSeriesPair {
    u64 r = 0;
    cplx s;
    cplx L1, L2;                // closed forms
    cplx L1_series, L2_series;  // sum of the odd / even r-power terms up to r^{2K+1}
    int K = 0;
    double tail = 0;            // geometric bound on the omitted terms
};

// Closed forms in the elementary symmetric functions e1, e2, e3 of the Satake triple:
//   L2 = (1 + e2 x^2) / prod_j (1 - g_j^2 x^2),  L1 = x (e1 + e3 x^2) / prod_j (1 - g_j^2 x^2),  x = r^{-s}.
// For a self-dual triple with trivial central character (e2 = e1 = a(r), e3 = 1) this is
//   L1 = (a + r^{-2s}) r^{-s} / prod,  L2 = (1 + a r^{-2s}) / prod.
LocalSeriesPair local_pair(const Satake& g, u64 r, cplx s, int K = 60);
LocalSeriesPair local_pair(const CoefficientSystem& sys, u64 r, cplx s, int K = 60);

// The same closed forms written through a = a(r) alone (self-dual, trivial central character).
LocalSeriesPair local_pair_from_coefficient(double a, u64 r, cplx s);

// ---- R_r ----

struct RrValue {
    cplx value;
    cplx numerator;    // (1 + 1/r) L1
    cplx denominator;  // 1/r + L2
    int eta = 1;
    bool singular = false;  // |denominator| < 1e-14
};

RrValue Rr_from_pair(const LocalSeriesPair& lp, int eta);
RrValue Rr(const CoefficientSystem& sys, const RayClass& E, u64 r, cplx s, const SymbolContext& ctx);

struct MonotoneScan {
    std::vector<double> a;
    std::vector<double> value;  // Re R_r at each grid point (R_r is real for real a and real s)
    bool strictly_monotone = false;
    int direction = 0;  // +1 increasing, -1 decreasing, 0 neither
    double min_gap = 0;  // smallest |consecutive difference|
};

// R_r(s) as a function of a(r) on [a_lo, a_hi] with the given step, eta = 1.
MonotoneScan rr_monotone_scan(u64 r, double s, double a_lo, double a_hi, double step);

// ---- Euler products ----

// L^S(s, pi, sym^2) = prod over odd P <= X of prod_{i <= j} (1 - g_i g_j P^{-s})^{-1}.
cplx sym2_partial(const CoefficientSystem& sys, cplx s, u64 X);

// Per-prime factor of T(s):  [1 + (L2_P(s) - 1) / (1 + 1/P)] prod_{i <= j} (1 - g_i g_j P^{-2s}).
cplx T_local(const Satake& g, u64 P, cplx s);

struct TValue {
    cplx value;     // product over odd P <= X
    cplx value_2X;  // product over odd P <= 2X
    double drift = 0;  // |value_2X - value| / |value_2X|
    bool stabilized = false;
};
TValue T_of_s(const CoefficientSystem& sys, cplx s, u64 X, double tol = 1e-4);

// The weighted square sum sum_{N <= X odd} a(N^2) N^{-2s} prod_{P | N} (1 + 1/P)^{-1}.
cplx weighted_square_sum(const CoefficientSystem& sys, cplx s, u64 X, u64 coprime_to = 1);
// Literal quotient weighted_square_sum(s, X) / sym2_partial(2s, X).
cplx T_literal(const CoefficientSystem& sys, cplx s, u64 X);

// ---- R_1 ----

struct R1Report {
    cplx value;
    double A_F = 1;
    int h_C = 1;
    double zeta2 = 0;
    double S_product = 1;
    cplx L_S;     // finite S-factor of L(s, pi x chi_E)
    cplx sym2;    // L^S(2s, pi, sym^2) truncated at X
    cplx sym2_2X;
    TValue T;
    bool flagged = false;  // sym^2 or T truncation not stabilized
};

// Local factor at the finite places of S of L(s, pi x chi_E).
cplx L_S_factor(const CoefficientSystem& sys, const RayClass& E, cplx s, const SymbolContext& ctx);
R1Report R1(const CoefficientSystem& sys, const RayClass& E, cplx s, u64 X, const SymbolContext& ctx,
            double tol = 1e-4);

// ---- identities ----

struct SwitchingReport {
    cplx lhs, rhs;  // Euler-product paths, r-factor summed from the coefficients
    double residual = 0;
    cplx lhs_literal, rhs_literal;  // literal truncated Dirichlet sums
    double literal_residual = 0;
};

// (1 + 1/r)^{-1} sum_{(N2, r) = 1} f(N2) against [1/r + L_{2,r}]^{-1} sum_N f(N),
// f(N) = a(N^2) N^{-2s} prod_{P | N} (1 + 1/P)^{-1}.
SwitchingReport switching_check(const CoefficientSystem& sys, u64 r, cplx s, u64 X, int K = 60);

struct DedekindReport {
    bool per_prime_exact = false;  // polynomial identities in u for every prime checked
    u64 primes_checked = 0;
    double euler_residual = 0;     // both Euler-product forms at the sample point
    cplx lhs, rhs;
    bool trivial_branch = false;
    double limit_value = 0;        // Richardson limit of (w - 1) zeta(2w) sum_D
    double limit_target = 0;       // prod_{p in S or p | N} (1 + 1/p)^{-1} A(F), or 0
    double limit_rel_error = 0;
    double pole_magnitude = 0;     // |(w - 1) value| at w = 1 + 1e-4
    bool ok = false;
};

// chi = rho chi_{r N0}; D runs over odd squarefree D prime to N.
DedekindReport dedekind_residue_factor_check(const ClassCharacter& rho, u64 r, u64 N, const SymbolContext& ctx,
                                             double w_sample = 2.0, u64 X = 10000, u64 prime_limit = 1000);

// ---- Hypothesis probe ----

struct ProbeRow {
    double s = 0;
    u64 X = 0;
    cplx value;
    double drift = 0;  // relative change from the previous X on the ladder
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    // most negative log10 drift at the top of the ladder, per s
    std::vector<std::pair<double, double>> digits;
};

// Partial products of prod_P (1 + a(P) P^{-2s}) (1 - g1 g2 P^{-2s}) (1 - g2 g3 P^{-2s}) (1 - g3 g1 P^{-2s}).
cplx probe_factor(const Satake& g, u64 P, cplx s);
ProbeReport hypothesis_probe(const CoefficientSystem& sys, const std::vector<double>& s_grid,
                             const std::vector<u64>& X_ladder);

// ---- scattering factor ----

// M(s, E) = [eps(s, pi x chi_E) / |E0|^{3(1/2 - s)}] prod_{v in S} L_v(1 - s) / L_v(s).
cplx scattering_M(const CoefficientSystem& sys, const RayClass& E, cplx s, const SymbolContext& ctx);

// ---- residue consistency ----

struct ConsistencyReport {
    cplx route_sum;         // L_S * sum over N with N0 = r of the Dedekind residues (1 when r = 1)
    cplx product;           // R1 R_r as displayed (R1 alone when r = 1)
    cplx product_weighted;  // R1 R_r (1 + 1/r)^{-1}: r divides N, so its Dedekind weight enters
    double deviation = 0;           // |route - product| / |product|
    double deviation_weighted = 0;  // |route - product_weighted| / |product_weighted|
    bool flagged = false;
};

ConsistencyReport residue_consistency(const CoefficientSystem& sys, const RayClass& E, u64 r, double s, u64 X,
                                      const SymbolContext& ctx);

// ---- helpers for experiments ----

// Self-dual triple (g, 1, 1/g) with trace a; g is on the unit circle when |a - 1| <= 2.
Satake self_dual_triple(double a);
// Copy of sys with a(r0) shifted by delta, keeping the triple self-dual.
CoefficientSystem perturb_coefficient(const CoefficientSystem& sys, u64 r0, double delta);
// System whose Satake data vanish except at r (coefficients supported on powers of r).
CoefficientSystem single_prime_system(u64 r, const Satake& g, u64 max_prime);

}  // namespace ddslab::residues
