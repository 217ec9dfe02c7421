#include <doctest.h>

#include <random>

#include "ddslab/quadchar.hpp"

using namespace ddslab;
using namespace ddslab::quadchar;
using ringarith::IdealRec;

namespace {

int legendre_euler(i64 a, u64 p) {
    i64 r = ((a % static_cast<i64>(p)) + static_cast<i64>(p)) % static_cast<i64>(p);
    if (r == 0) return 0;
    u64 v = 1, b = static_cast<u64>(r), e = (p - 1) / 2;
    while (e) {
        if (e & 1) v = v * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return v == 1 ? 1 : -1;
}

// Kronecker symbol (d/n) for odd n via prime factorisation and Euler's criterion.
int kronecker_oracle(i64 d, u64 n) {
    int v = 1;
    for (u64 p = 3; p <= n; p += 2)
        while (n % p == 0) {
            v *= legendre_euler(d, p);
            n /= p;
        }
    return v;
}

int reciprocity_oracle(u64 a, u64 b) { return (((a - 1) / 2) % 2 && ((b - 1) / 2) % 2) ? -1 : 1; }

u64 gcd(u64 a, u64 b) { return b ? gcd(b, a % b) : a; }

}  // namespace

TEST_CASE("context over Q") {
    auto ctx = build_context(ringarith::BaseField::rational());
    CHECK(ctx.h_C == 4);
    CHECK(ctx.generators == std::vector<u64>{3, 5});
    CHECK(ctx.C == 8);
    // brute-force group table of (Z/8)^x: every element squares to 1, generated by 3 and 5
    for (u64 a : {1, 3, 5, 7}) CHECK(a * a % 8 == 1);
    CHECK(3 * 5 % 8 == 7);
    CHECK(ctx.class_of(17).index() == ctx.class_of(1).index());
    CHECK(ctx.class_of(15).index() == ctx.class_of(7).index());
    CHECK_THROWS_AS(build_context(ringarith::BaseField::quadratic(5)), ConfigError);
}

TEST_CASE("decompose") {
    auto ctx = build_context(ringarith::BaseField::rational());
    auto d17 = decompose(IdealRec::rational(17), ctx);
    CHECK(d17.m == Rational{17, 1});
    CHECK(d17.m_E == 1);
    CHECK(d17.G.is_unit());
    auto d9 = decompose(IdealRec::rational(9), ctx);
    CHECK(d9.m == Rational{1, 1});
    CHECK(d9.m_E == 1);
    CHECK(d9.G.norm == 3);
    auto d3 = decompose(IdealRec::rational(3), ctx);
    CHECK(d3.m == Rational{1, 1});
    CHECK(d3.m_E == 3);
    CHECK(d3.G.is_unit());
    for (u64 n = 1; n < 400; n += 2) CHECK(chi(IdealRec::rational(3), IdealRec::rational(n), ctx) == kronecker_oracle(3, n));
    // m is congruent to 1 mod 8 as a 2-adic unit: num = den mod 8
    for (u64 D = 1; D < 2000; D += 2) {
        auto dec = decompose(IdealRec::rational(D), ctx);
        CHECK((dec.m.num - dec.m.den) % 8 == 0);
        CHECK(dec.m.num > 0);
        auto back = IdealRec::rational(dec.m_E) * dec.G * dec.G;
        CHECK(back.norm * dec.m.num == D * dec.m.den);
    }
    CHECK_THROWS_AS(decompose(IdealRec::rational(6), ctx), DomainError);
}

TEST_CASE("chi values") {
    auto ctx = build_context(ringarith::BaseField::rational());
    auto I = [](u64 n) { return IdealRec::rational(n); };
    CHECK(chi(I(5), I(3), ctx) == -1);
    CHECK(legendre_euler(2, 3) == -1);
    for (u64 D = 1; D < 100; D += 2) CHECK(chi(I(D), I(1), ctx) == 1);
    CHECK(chi(I(45), I(7), ctx) == -1);
    CHECK(chi(I(45), I(7), ctx) == chi(I(5), I(7), ctx));
    CHECK_THROWS_AS(chi(I(4), I(3), ctx), DomainError);
}

TEST_CASE("Kronecker oracle and reciprocity for pairs up to 500") {
    auto ctx = build_context(ringarith::BaseField::rational());
    for (u64 d = 1; d <= 500; d += 2)
        for (u64 n = 1; n <= 500; n += 2) {
            if (gcd(d, n) != 1) continue;
            int c = chi_int(d, n);
            CHECK(c == kronecker_oracle(static_cast<i64>(d), n));
            CHECK(c * chi_int(n, d) == eta(ctx.class_of(d), ctx.class_of(n), ctx));
            CHECK(eta(ctx.class_of(d), ctx.class_of(n), ctx) == reciprocity_oracle(d, n));
        }
}

TEST_CASE("multiplicativity and squarefree dependence") {
    for (u64 a = 1; a <= 61; a += 2)
        for (u64 b = 1; b <= 61; b += 2)
            for (u64 N = 1; N <= 500; N += 2) {
                if (gcd(a * b, N) != 1) continue;
                CHECK(chi_int(a * b, N) == chi_int(a, N) * chi_int(b, N));
            }
    for (u64 D = 1; D <= 10000; D += 2) {
        auto [D0, D1] = ringarith::squarefree_split_u64(D);
        for (u64 N : {3, 7, 11, 15, 21, 105}) CHECK(chi_int(D, N) == chi_int(D0, N));
    }
    // total multiplicativity in N
    for (u64 D = 1; D <= 200; D += 2)
        for (u64 a = 1; a <= 40; a += 2)
            for (u64 b = 1; b <= 40; b += 2) CHECK(chi_int(D, a * b) == chi_int(D, a) * chi_int(D, b));
}

TEST_CASE("eta table") {
    auto ctx = build_context(ringarith::BaseField::rational());
    RayClass one = ctx.class_of(1), c3 = ctx.class_of(3), c5 = ctx.class_of(5);
    for (int i = 0; i < 4; ++i) {
        CHECK(eta(one, RayClass::from_index(i, 2), ctx) == 1);
        for (int j = 0; j < 4; ++j) CHECK(ctx.eta[i][j] == ctx.eta[j][i]);
    }
    CHECK(eta(c3, c3, ctx) == -1);
    CHECK(legendre_euler(3, 7) * legendre_euler(7, 3) == -1);
    CHECK(eta(c3, c5, ctx) == 1);
}

TEST_CASE("class sieve") {
    auto ctx = build_context(ringarith::BaseField::rational());
    auto t1 = sieve_delta(ctx.class_of(1), ctx);
    REQUIRE(t1.size() == 4);
    for (auto& t : t1) CHECK(t.coeff == Rational{1, 4});
    auto t3 = sieve_delta(ctx.class_of(3), ctx);
    CHECK(apply_sieve(t3, ctx.class_of(3)) == Rational{1, 1});
    CHECK(apply_sieve(t3, ctx.class_of(5)) == Rational{0, 1});
    // orthogonality over all class pairs, and partition of unity
    for (int e = 0; e < 4; ++e)
        for (int d = 0; d < 4; ++d) {
            auto r = apply_sieve(sieve_delta(RayClass::from_index(e, 2), ctx), RayClass::from_index(d, 2));
            CHECK(r == (e == d ? Rational{1, 1} : Rational{0, 1}));
        }
    for (int d = 0; d < 4; ++d) {
        i64 total = 0;
        for (int e = 0; e < 4; ++e)
            total += apply_sieve(sieve_delta(RayClass::from_index(e, 2), ctx), RayClass::from_index(d, 2)).num;
        CHECK(total == 1);
    }
}

TEST_CASE("context serialization round trip") {
    auto ctx = build_context(ringarith::BaseField::rational());
    auto text = ctx.to_text();
    auto back = SymbolContext::from_text(text);
    CHECK(back.to_text() == text);
    CHECK(back.eta == ctx.eta);
    CHECK_THROWS_AS(SymbolContext::from_text("format = other\n"), ConfigError);
    std::string bad = text;
    bad.replace(bad.find("version = 1"), 11, "version = 9");
    CHECK_THROWS_AS(SymbolContext::from_text(bad), ConfigError);
}
