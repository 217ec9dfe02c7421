#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddslab/common.hpp"

namespace ddslab::ringarith {

enum class FieldKind { Rational, Quadratic };
enum class Splitting { Split = 0, Ramified = 1, Inert = 2 };

const char* splitting_name(Splitting s);

struct BaseField {
    FieldKind kind = FieldKind::Rational;
    i64 d = 1;              // squarefree parameter of Q(sqrt d); 1 for Q
    i64 discriminant = 1;   // field discriminant
    double zeta_residue = 1.0;
    int class_number_over_S = 1;
    std::vector<u64> certificate;  // extra S-primes making the S-class number one

    static BaseField rational();
    // Accepts class-number-one fields from the built-in list, otherwise needs certificate primes.
    static BaseField quadratic(i64 d, std::vector<u64> certificate = {});

    bool is_rational() const { return kind == FieldKind::Rational; }
    std::string name() const;
    Splitting splitting_of(u64 p) const;
};

struct PrimeIdealRec {
    u64 norm = 0;
    u64 p = 0;
    Splitting tag = Splitting::Split;
    u64 gen = 0;  // split: root r of x^2 = d mod p (r <= p - r picks the first); else 0

    int degree() const { return norm == p ? 1 : 2; }
    bool operator==(const PrimeIdealRec& o) const {
        return norm == o.norm && p == o.p && tag == o.tag && gen == o.gen;
    }
    bool operator<(const PrimeIdealRec& o) const;
    std::string str() const;
};

struct IdealRec {
    std::vector<std::pair<PrimeIdealRec, int>> factors;
    u64 norm = 1;

    static IdealRec unit() { return {}; }
    // Ideal (n) of Z.
    static IdealRec rational(u64 n);
    static IdealRec from_factors(std::vector<std::pair<PrimeIdealRec, int>> f);

    bool is_unit() const { return factors.empty(); }
    bool squarefree() const;
    bool divides(const IdealRec& o) const;
    int exponent(const PrimeIdealRec& P) const;
    // Z-generator for ideals of Z; throws for ideals of a quadratic field.
    u64 as_integer() const;

    IdealRec operator*(const IdealRec& o) const;
    bool operator==(const IdealRec& o) const { return norm == o.norm && factors == o.factors; }
    bool operator<(const IdealRec& o) const;
    std::string str() const;
};

struct SFDecomposition {
    IdealRec D0;
    IdealRec D1;
};

// Rational primes whose places are removed (the archimedean place is implicit).
using PrimeSet = std::vector<u64>;

bool in_set(const PrimeSet& S, u64 p);

std::vector<PrimeIdealRec> primes_over(const BaseField& F, u64 p);
std::vector<IdealRec> enumerate_ideals(const BaseField& F, const PrimeSet& S, u64 X);

SFDecomposition squarefree_split(const IdealRec& D);
IdealRec recompose(const SFDecomposition& s);
int moebius(const IdealRec& D);

// Fast paths over Z.
int moebius_u64(u64 n);
std::pair<u64, u64> squarefree_split_u64(u64 n);  // (n0, n1) with n = n0 n1^2

cplx zeta_partial(const BaseField& F, cplx w, const PrimeSet& S, u64 X);

// L(1, chi_Delta) by the finite Dirichlet class-number formula.
double quadratic_L1(i64 disc);
bool is_fundamental_discriminant(i64 d);

}  // namespace ddslab::ringarith
