#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ddslab/lseries.hpp"
#include "ddslab/quadchar.hpp"

namespace ddslab::dds {

using lseries::CoefficientSystem;
using lseries::Satake;
using quadchar::ClassCharacter;
using quadchar::SymbolContext;
using Rational = boost::multiprecision::cpp_rational;

// ---- truncation and results ----

enum class Order { DFirst, NFirst };
enum class InnerSum { Dirichlet, Euler };  // inner L: truncated Dirichlet series or Euler product

struct TruncationSpec {
    u64 X_D = 1000;
    u64 X_N = 1000;  // N cutoff, or prime cutoff when inner == Euler
    double tolerance = 1e-6;
    Order order = Order::DFirst;
    InnerSum inner = InnerSum::Dirichlet;

    void validate() const;
};

const char* order_name(Order o);

struct DDSValue {
    cplx value;
    double last_term = 0;  // largest |term| among D at the cutoff
    double tail = 0;       // bound for the omitted part of the double sum
    u64 terms = 0;
    bool partial = false;  // tail above the requested tolerance
};

// Class function on H_C times an optional quadratic character n -> (q / n).
struct Twist {
    std::vector<cplx> cls;  // indexed by RayClass::index()
    u64 quad = 1;

    static Twist trivial(const SymbolContext& ctx);
    static Twist character(const ClassCharacter& rho, const SymbolContext& ctx, u64 quad = 1);
    static Twist delta(const quadchar::RayClass& E, const SymbolContext& ctx);
    Twist times(const Twist& o) const;  // pointwise product
    bool multiplicative() const;        // a character of H_C (values +-1, trivial class 1)
};

// ---- correction polynomials ----

// c[i][j] multiplies X^i Y^j with X = eps_N |P|^{-s}, Y = eps_D |P|^{-w}; eps are the local character signs.
struct CorrectionPolynomial {
    u64 P = 0;
    std::vector<std::vector<cplx>> c;

    cplx at(std::size_t i, std::size_t j) const { return i < c.size() && j < c[i].size() ? c[i][j] : cplx(0); }
    cplx eval(cplx X, cplx Y) const;
};

struct LocalCorrection {
    u64 P = 0;
    int K = 6;                      // prime powers P^0..P^K in each variable
    std::vector<std::vector<cplx>> A;  // A[k](X), degree 6 floor(k/2)
    std::vector<std::vector<cplx>> B;  // B[l](Y), degree 2 floor(l/2); kept up to 2K
    double residual = 0;            // max relative residual of the local identity
    int rank_deficiency = 0;

    CorrectionPolynomial a_side() const;  // c[i][j] = A[j][i]
    CorrectionPolynomial b_side() const;  // c[i][j] = B[i][j]
    cplx a_value(int k, cplx X) const;
    cplx b_value(int l, cplx Y) const;
};

// Solve the local system forced by the basic identity plus both functional equations.
LocalCorrection solve_correction_local(u64 P, const Satake& gamma, int K = 6);
LocalCorrection solve_correction_local(u64 P, const CoefficientSystem& sys, int K = 6);

struct FeResidual {
    double a_side = 0;
    double b_side = 0;
};
// Max relative residual of both one-variable functional equations at random complex points.
FeResidual correction_fe_residual(const LocalCorrection& lc, int points, std::uint64_t seed);

// Per-prime cache, filled lazily; safe for concurrent readers.
class CorrectionCache {
public:
    explicit CorrectionCache(const CoefficientSystem& sys, int K = 6) : sys_(sys), K_(K) {}
    std::shared_ptr<const LocalCorrection> get(u64 P) const;
    int K() const { return K_; }

private:
    const CoefficientSystem& sys_;
    int K_;
    mutable std::mutex mu_;
    mutable std::map<u64, std::shared_ptr<const LocalCorrection>> cache_;
};

// a^S(s, D, pi, alpha) over Q for odd D; chi-values from the Jacobi symbol.
cplx a_factor(cplx s, u64 D, const Twist& alpha, const CorrectionCache& cc, const SymbolContext& ctx);
cplx b_factor(cplx w, u64 M, const Twist& beta, const CorrectionCache& cc, const SymbolContext& ctx);

// ---- double Dirichlet series over Q (S = {inf, 2}) ----

// Coefficient table a(1..n) for the pure series; index 0 unused.
using CoeffTable = std::vector<cplx>;
CoeffTable coefficient_table(const CoefficientSystem& sys, u64 n);

DDSValue Z_pure(cplx s, cplx w, const CoeffTable& a, const SymbolContext& ctx, const TruncationSpec& t);
DDSValue Z_pure(cplx s, cplx w, const CoefficientSystem& sys, const SymbolContext& ctx, const TruncationSpec& t);

enum class DRestrict { None, Squarefree, RDividesD1, D1CoprimeTo };

struct SeriesRequest {
    cplx s{2.5, 0}, w{2.5, 0};
    Twist alpha;  // must be multiplicative
    Twist beta;
    bool corrected = true;
    DRestrict restrict = DRestrict::None;
    u64 r = 1;
    std::vector<u64> extra_S;  // odd primes removed from both sums
    u64 support_prime = 0;     // nonzero: D and N run over powers of this prime only
};

// D-side: sum_D beta(D) |D|^{-w} a(s, D, alpha) L^S(s, pi x chi_D alpha).
DDSValue corrected_Z(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                     const SymbolContext& ctx, const TruncationSpec& t);
// M-side: sum_M alpha(M) |M|^{-s} b(w, M, beta) L^S(w, chi_M beta), box truncated, reciprocity
// signs eta([D],[M]) applied termwise.
DDSValue corrected_Z_M(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                       const SymbolContext& ctx, const TruncationSpec& t);

DDSValue Z_star(cplx s, cplx w, const CoefficientSystem& sys, const SymbolContext& ctx, const Twist& alpha,
                const Twist& beta, const TruncationSpec& t);
DDSValue Z_r(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc, const SymbolContext& ctx,
             u64 r, const TruncationSpec& t, const Twist* alpha = nullptr, const Twist* beta = nullptr);
DDSValue Z_paren_l(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc, const SymbolContext& ctx,
                   u64 l, const TruncationSpec& t, const Twist* alpha = nullptr, const Twist* beta = nullptr);

struct IdentityCheck {
    cplx lhs, rhs;
    double residual = 0;  // |lhs - rhs| / max(1, |lhs|)
    bool ok = false;
};

IdentityCheck basic_identity_check(const SeriesRequest& req, const CoefficientSystem& sys, const CorrectionCache& cc,
                                   const SymbolContext& ctx, const TruncationSpec& t, double tol);

// prod_{P|l} prod_j (1 - gamma_j(P)^2 |P|^{-2s}) Z_(l) against its expansion in Z^{S_l} values.
IdentityCheck zl_expansion_check(cplx s, cplx w, const CoefficientSystem& sys, const CorrectionCache& cc,
                                 const SymbolContext& ctx, u64 l, const Twist& alpha, const Twist& beta,
                                 const TruncationSpec& t, double tol);

// ---- exact sieve identities ----

using IdealFunction = std::map<u64, Rational>;  // odd positive n -> f(n), finite support

struct SieveCheck {
    Rational mobius_lhs, squarefree_rhs;  // sum_r mu(r) sum_{r | D1} f = sum_{squarefree} f
    Rational zr_lhs, zl_rhs;              // sum_{r | D1} f = sum_{l | r} mu(l) sum_{(D1, l) = 1} f
    bool ok = false;
};

SieveCheck sieve_identity_check(const IdealFunction& f, u64 r);

// ---- refined functional equations ----

enum class Side { Phi, Psi };

struct RefinedTerm {
    std::array<u64, 3> l{1, 1, 1};
    std::array<u64, 3> m{1, 1, 1};
    u64 twist = 1;  // product of all l_j m_j; the series is twisted by chi_twist
};

struct RefinedExpansion {
    Side side = Side::Psi;
    u64 r = 1;
    u64 f_r = 1;              // primes of r dividing the conductor of the character
    std::vector<u64> primes;  // primes of r / f_r
    std::vector<RefinedTerm> terms;

    // Coefficient of a term at z (s on the phi side, w on the psi side); chi_val is the
    // class character on primes, gamma the Satake data (phi side only).
    cplx coefficient(const RefinedTerm& t, cplx z, const std::function<int(u64)>& chi_val,
                     const std::function<Satake(u64)>& gamma) const;
    // sum of coefficient * chi_D(twist) given chi_D on the primes of r.
    cplx evaluate(cplx z, const std::function<int(u64)>& chi_val, const std::function<Satake(u64)>& gamma,
                  const std::function<int(u64)>& chi_D) const;
    // prod over P of (1 - c^2 |P|^{2z-2}) L_P(1 - z) / L_P(z), the product the expansion encodes.
    cplx closed_form(cplx z, const std::function<int(u64)>& chi_val, const std::function<Satake(u64)>& gamma,
                     const std::function<int(u64)>& chi_D) const;
};

RefinedExpansion refined_fe_expand(u64 r, const ClassCharacter& chi, Side side, const SymbolContext& ctx);

// ---- termwise functional equations ----

struct FeTerm {
    int degree = 3;  // 3: D-term with pi, 1: M-term with GL(1)
    u64 n = 1;       // D or M, odd
    ClassCharacter chi;  // alpha (degree 3) or beta (degree 1)
};

struct FeTermResult {
    cplx lhs, rhs;
    double residual = 0;
    bool flagged = false;
};

FeTermResult fe_termwise_check(const FeTerm& term, cplx point, const CoefficientSystem* sys,
                               const CorrectionCache* cc, const SymbolContext& ctx, double tol = 1e-6);

}  // namespace ddslab::dds
