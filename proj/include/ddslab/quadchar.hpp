#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddslab/ringarith.hpp"

namespace ddslab::quadchar {

using ringarith::BaseField;
using ringarith::IdealRec;

struct RayClass {
    std::vector<int> e;  // exponents over the generator classes, each 0 or 1

    int index() const;
    static RayClass from_index(int idx, int k);
    bool operator==(const RayClass& o) const { return e == o.e; }
    RayClass operator*(const RayClass& o) const;
    std::string str() const;
};

// Character of H_C given by its values on the generator classes.
struct ClassCharacter {
    std::vector<int> values;  // each +1 or -1

    int operator()(const RayClass& c) const;
    bool trivial() const;
    std::string str() const;
};

struct Rational {
    i64 num = 0;
    i64 den = 1;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

struct Decomposition {
    Rational m;        // totally positive, m = 1 mod C in the 2-adic sense
    RayClass E;        // class of the representative
    u64 m_E = 1;       // generator of the representative E
    IdealRec G;
};

struct SymbolContext {
    BaseField field;
    std::vector<std::string> places;  // e.g. {"inf", "2"}
    ringarith::PrimeSet S;            // finite primes of S
    u64 C = 8;
    std::vector<u64> generators;       // generator classes realised by these integers
    std::vector<u64> representatives;  // m_E for each class index
    int h_C = 4;
    std::vector<std::vector<int>> eta;  // eta[i][j] over class indices

    int k() const { return static_cast<int>(generators.size()); }
    RayClass class_of(u64 n) const;
    RayClass class_of(const IdealRec& D) const;
    std::vector<ClassCharacter> characters() const;

    std::string to_text() const;
    static SymbolContext from_text(const std::string& text);
};

SymbolContext build_context(const BaseField& F);

Decomposition decompose(const IdealRec& D, const SymbolContext& ctx);

// Quadratic symbol chi_D(N); D, N prime to S.
int chi(const IdealRec& D, const IdealRec& N, const SymbolContext& ctx);
// Integer fast path over Q: chi_D(N) for odd D, N.
int chi_int(u64 D, u64 N);

int eta(const RayClass& c1, const RayClass& c2, const SymbolContext& ctx);

struct SieveTerm {
    ClassCharacter rho;
    Rational coeff;  // rho(E)^{-1} / h_C
};

std::vector<SieveTerm> sieve_delta(const RayClass& E, const SymbolContext& ctx);

// sum over the expansion of coeff * rho(D); returns numerator over h_C as an exact rational.
Rational apply_sieve(const std::vector<SieveTerm>& terms, const RayClass& D);

}  // namespace ddslab::quadchar
