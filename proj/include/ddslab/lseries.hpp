#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ddslab/quadchar.hpp"
#include "ddslab/ringarith.hpp"

namespace ddslab::lseries {

using ringarith::IdealRec;
using ringarith::PrimeSet;

// ---- gamma ----
cplx log_gamma(cplx z);
cplx gamma_fn(cplx z);
// log of Gamma_R(s) = pi^{-s/2} Gamma(s/2)
cplx log_gamma_R(cplx s);

// ---- coefficient systems ----
using Satake = std::array<cplx, 3>;

// Complete homogeneous symmetric polynomials h_0..h_K of three variables.
std::vector<cplx> h_series(const Satake& g, int K);
// Elementary symmetric polynomials (e1, e2, e3).
std::array<cplx, 3> elementary(const Satake& g);

class CoefficientSystem {
public:
    std::string label;
    u64 conductor = 1;
    cplx root_number = 1.0;
    std::vector<double> shifts;  // gamma factor prod_j Gamma_R(s + mu_j)
    bool self_dual = false;
    bool synthetic = false;
    std::vector<u64> ramified;

    CoefficientSystem() = default;
    CoefficientSystem(std::string label, std::vector<std::uint32_t> primes, std::vector<Satake> satake);

    // Gate checks: gamma1 gamma2 gamma3 = 1, |gamma_j| <= p^{5/14}(1+1e-9), self-dual closure.
    void validate() const;

    u64 max_prime() const { return primes_.empty() ? 1 : primes_.back(); }
    const std::vector<std::uint32_t>& primes() const { return primes_; }
    const std::vector<Satake>& satake_table() const { return satake_; }
    bool has_prime(u64 p) const;
    const Satake& satake(u64 p) const;
    void set_satake(u64 p, const Satake& g);

    cplx coeff_prime_power(u64 p, int k) const;
    cplx coeff(u64 n) const;
    cplx coeff(const IdealRec& N) const;
    // a(1..N), index 0 unused. Requires N <= max_prime().
    std::vector<cplx> coefficient_table(u64 N) const;
    std::vector<double> real_coefficient_table(u64 N) const;

    // sym^2 data
    cplx sym2_coeff(u64 p) const;
    std::array<cplx, 6> sym2_satake(u64 p) const;

    // Largest |a(p)| / p^{3/8} over stored primes (entry condition of the matrix bound).
    double max_entry_ratio() const;

private:
    std::vector<std::uint32_t> primes_;
    std::vector<Satake> satake_;
    std::size_t index_of(u64 p) const;
};

struct HeckeEigen {
    std::uint32_t p;
    double a;  // normalised, |a| <= 2
};

CoefficientSystem gl2_to_sym2(const std::vector<HeckeEigen>& ev, const std::string& label,
                              std::vector<double> shifts = {1, 11, 12});

// Random unit-modulus triples with product one; not self-dual; labelled synthetic.
CoefficientSystem synthetic_system(u64 max_prime, std::uint64_t seed);

// ---- Delta ----
// tau(n) for 1 <= n <= K (index 0 unused), exact.
std::vector<__int128> delta_qexp(u64 K);
// tau(p)/p^{11/2} for primes p <= P.
std::vector<HeckeEigen> delta_eigenvalues(u64 P);
CoefficientSystem sym2_delta(u64 max_prime);
std::string int128_str(__int128 v);

// ---- partial L-functions ----
struct PartialValue {
    cplx value;
    double tail = 0;  // geometric tail estimate (0 when not available)
};

// Character on odd n (or all n); used by the GL(1) and twisted GL(3) products.
using CharFn = std::function<int(u64)>;

PartialValue L_partial_gl1(const CharFn& chi, cplx w, const PrimeSet& S, u64 X);
PartialValue L_partial_gl3(const CoefficientSystem& sys, const CharFn& chi, cplx s, const PrimeSet& S, u64 X);

enum class Degree { GL1 = 1, GL3 = 3 };
cplx epsilon_factor(Degree kind, const CoefficientSystem* sys, const IdealRec& D0, cplx point);
cplx epsilon_class_transport(const CoefficientSystem& sys, const IdealRec& D, const IdealRec& E, cplx point,
                             const quadchar::SymbolContext& ctx, int degree = 3);

// ---- twists over Q ----
// Primitive discriminant attached to chi_D for odd squarefree D0: D0 if D0 = 1 mod 4, else 4 D0.
i64 primitive_discriminant(u64 D0);
// Fundamental discriminant d with kronecker(d, n) = rho(n) (D0 / n) on odd n; rho given by values on 3, 5 classes.
i64 discriminant_for(int rho3, int rho5, u64 D0);

// ---- completed L-functions and the approximate functional equation ----
struct Pole {
    cplx rho;
    cplx residue;  // residue of Lambda at rho
};

struct CompletedLParams {
    std::vector<double> shifts;
    double conductor = 1;
    cplx root_number = 1.0;
    int degree = 1;
    std::vector<Pole> poles;
};

CompletedLParams gl1_params(i64 d);  // primitive real character of discriminant d (d = 1 gives zeta)
CompletedLParams gl3_twist_params(const CoefficientSystem& sys, i64 d);

// Mellin weight g(z) for the contour integrals; must satisfy g(0) = 1.
struct Smoothing {
    enum Kind { Unit, Gaussian } kind = Unit;
    double lambda = 8.0;  // exp(z^2 / lambda) for Gaussian
    cplx operator()(cplx z) const { return kind == Unit ? cplx(1.0) : std::exp(z * z / lambda); }
};

struct AfeOptions {
    double y_max = 0;  // cutoff n <= y_max * sqrt(q) * cutoff_scale; 0 picks 6 (degree 1) or 11 (degree 3)
    double cutoff_scale = 1.0;
    double quad_step = 0.05;
    double quad_rel_tol = 1e-18;
    double log_grid_step = 0.01;
    Smoothing smoothing;
};

// H_s(y) = (1/2 pi i) int gamma(s+z) y^{-z} g(z) dz / z, tabulated.
class KernelTable {
public:
    KernelTable(const CompletedLParams& P, cplx s, const Smoothing& g, double y_min, double y_max,
                double quad_step, double rel_tol, double log_step);
    cplx H(double y) const;
    // Quadrature without interpolation; optional derivative dH/dy.
    cplx direct(double y, cplx* dHdy = nullptr) const;
    cplx gamma_at_s() const { return residue0_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

private:
    struct Contour {
        double c;
        std::vector<cplx> weight;  // gamma(s+z) g(z)/z * h/(2pi)
        std::vector<double> t;
    };
    Contour make_contour(double c) const;
    cplx eval(const Contour& C, double u, cplx* deriv) const;

    CompletedLParams P_;
    cplx s_;
    Smoothing g_;
    double h_, tol_;
    cplx residue0_;
    Contour right_, left_;
    bool has_left_ = false;
    double y_min_, y_max_, u0_, du_;
    std::vector<cplx> val_, der_;  // d/du
};

struct CentralValue {
    cplx Lambda;
    cplx L;
    u64 terms = 0;
    double y_max = 0;
};

// Coefficient accessor a(n), n >= 1.
using CoeffFn = std::function<cplx(u64)>;

CentralValue lvalue(const CompletedLParams& P, const CoeffFn& a, cplx s, const AfeOptions& opt = {});
cplx gamma_factor(const CompletedLParams& P, cplx s);  // prod Gamma_R(s + mu)

struct FeCheck {
    cplx lhs, rhs;
    double residual;
};
// Lambda(w) with g = 1 against eps Lambda(1 - w) with a Gaussian weight.
FeCheck fe_self_check(const CompletedLParams& P, const CoeffFn& a, cplx w, const AfeOptions& opt = {});

// Fast real central values L(1/2, pi x chi_d) for many twists; coefficients b[n] = a(n)/sqrt(n).
class CentralValueBatch {
public:
    CentralValueBatch(const CoefficientSystem& sys, u64 n_max, double y_max);
    u64 n_max() const { return b_.size() - 1; }
    double y_max() const { return y_max_; }
    // L(1/2, pi x chi_d) for a positive fundamental discriminant d (even character, root number +1).
    double central(i64 d) const;
    // Terms needed for discriminant d.
    u64 terms_for(i64 d) const;
    double coeff(u64 n) const { return b_[n] * std::sqrt(static_cast<double>(n)); }

private:
    std::vector<double> b_;
    double y_max_;
    double sqrt_cond_;
    std::vector<double> shifts_;
    double gamma_half_;
    // H_{1/2} on a log grid for small y and on a uniform grid (value, dH/dy) for y >= y_split
    std::shared_ptr<KernelTable> kernel_;
    double y_split_, dy_;
    std::vector<double> hv_, hd_;
};

// Remove the 2-Euler factor: L^S = L * prod_j (1 - gamma_j(2) chi(2) 2^{-s}).
cplx remove_two_factor(const CoefficientSystem& sys, int chi2, cplx s, cplx value);

// Riemann zeta by Euler-Maclaurin (complex s != 1).
cplx riemann_zeta(cplx s);

// ---- coefficient cache ----
struct CacheHeader {
    std::string field = "Q";
    std::string label;
    u64 count = 0;
};

void write_cache(const std::string& path, const CoefficientSystem& sys);
CoefficientSystem read_cache(const std::string& path);
std::string cache_dir();

}  // namespace ddslab::lseries
