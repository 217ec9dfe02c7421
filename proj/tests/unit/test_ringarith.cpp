#include <doctest.h>

#include <cmath>
#include <map>

#include "ddslab/ringarith.hpp"

using namespace ddslab;
using namespace ddslab::ringarith;

namespace {

// Euler criterion a^((p-1)/2) mod p.
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

int mobius_brute(u64 n) {
    int m = 1;
    for (u64 p = 2; p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        m = -m;
    }
    return m;
}

}  // namespace

TEST_CASE("enumerate over Q prime to 2") {
    auto F = BaseField::rational();
    auto v = enumerate_ideals(F, {2}, 10);
    std::vector<u64> norms;
    for (auto& I : v) norms.push_back(I.norm);
    CHECK(norms == std::vector<u64>{1, 3, 5, 7, 9});
    auto one = enumerate_ideals(F, {2}, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].is_unit());
}

TEST_CASE("Q(sqrt 5): 11 splits into two primes") {
    CHECK(legendre_euler(5, 11) == 1);
    auto F = BaseField::quadratic(5);
    auto v = enumerate_ideals(F, {2}, 11);
    int n11 = 0;
    std::vector<IdealRec> primes11;
    for (auto& I : v)
        if (I.norm == 11) primes11.push_back(I);
    n11 = static_cast<int>(primes11.size());
    CHECK(n11 == 2);
    CHECK_FALSE(primes11[0] == primes11[1]);
}

TEST_CASE("Q(sqrt d) ideal counts match a splitting scan") {
    for (i64 d : {5, -1, 13, -7}) {
        auto F = BaseField::quadratic(d);
        i64 disc = F.discriminant;
        const u64 X = 1000;
        // number of ideals of norm n prime to 2 is sum over k | n of the character (disc/k)
        std::vector<int> count(X + 1, 0);
        for (u64 n = 1; n <= X; n += 2) {
            int c = 0;
            for (u64 k = 1; k <= n; ++k)
                if (n % k == 0) {
                    int chi = 1;
                    u64 m = k;
                    for (u64 p = 3; p <= m; p += 2)
                        while (m % p == 0) {
                            chi *= legendre_euler(disc, p);
                            m /= p;
                        }
                    c += chi;
                }
            count[n] = c;
        }
        std::map<u64, int> got;
        for (auto& I : enumerate_ideals(F, {2}, X)) ++got[I.norm];
        long total_expected = 0, total_got = 0;
        for (u64 n = 1; n <= X; ++n) {
            total_expected += count[n];
            CHECK(got[n] == count[n]);
        }
        for (auto& [n, c] : got) total_got += c;
        CHECK(total_got == total_expected);
    }
}

TEST_CASE("quadratic field without certificate is rejected") {
    CHECK_THROWS_AS(BaseField::quadratic(10), ConfigError);
    CHECK_NOTHROW(BaseField::quadratic(10, {3}));
}

TEST_CASE("squarefree split") {
    auto s = squarefree_split(IdealRec::rational(45));
    CHECK(s.D0.norm == 5);
    CHECK(s.D1.norm == 3);
    auto u = squarefree_split(IdealRec::rational(1));
    CHECK(u.D0.is_unit());
    CHECK(u.D1.is_unit());
    auto t = squarefree_split(IdealRec::rational(27 * 25));
    CHECK(t.D0.norm == 3);
    CHECK(t.D1.norm == 15);
    for (auto& D : enumerate_ideals(BaseField::rational(), {}, 10000)) {
        auto sp = squarefree_split(D);
        CHECK(sp.D0.squarefree());
        CHECK(recompose(sp) == D);
    }
}

TEST_CASE("squarefree split round-trip over Q(sqrt 5)") {
    for (auto& D : enumerate_ideals(BaseField::quadratic(5), {2}, 2000)) CHECK(recompose(squarefree_split(D)) == D);
}

TEST_CASE("moebius") {
    CHECK(moebius(IdealRec::rational(15)) == 1);
    CHECK(moebius(IdealRec::rational(9)) == 0);
    CHECK(moebius(IdealRec::rational(105)) == -1);
    for (u64 n = 1; n <= 100000; n += (n < 2000 ? 1 : 37)) CHECK(moebius_u64(n) == mobius_brute(n));
    for (u64 n = 1; n <= 3000; ++n) CHECK(moebius(IdealRec::rational(n)) == mobius_brute(n));
}

TEST_CASE("norm multiplicativity") {
    auto v = enumerate_ideals(BaseField::quadratic(5), {2}, 300);
    for (std::size_t i = 0; i < v.size(); i += 7)
        for (std::size_t j = 0; j < v.size(); j += 11) CHECK((v[i] * v[j]).norm == v[i].norm * v[j].norm);
}

TEST_CASE("zeta_partial") {
    auto F = BaseField::rational();
    // direct series oracle for zeta(2)
    double z2 = 0;
    for (int n = 200000; n >= 1; --n) z2 += 1.0 / (double(n) * n);
    z2 += 1.0 / 200000.5;
    CHECK(std::abs(zeta_partial(F, 2.0, {}, 1000000).real() - z2) < 1e-6);
    CHECK(std::abs(zeta_partial(F, 2.0, {}, 1000000).real() - 1.6449341) < 1e-6);
    CHECK(zeta_partial(F, 2.0, {}, 1) == cplx(1.0));
    CHECK(std::abs(zeta_partial(F, 2.0, {2}, 1000000).real() - 0.75 * z2) < 1e-6);
    CHECK(std::abs(zeta_partial(F, 2.0, {2}, 1000000).real() - 1.2337006) < 1e-6);
    CHECK_THROWS_AS(zeta_partial(F, 1.0, {}, 10), DomainError);
    // monotone in X for real w > 1
    double prev = 0;
    for (u64 X : {1, 10, 100, 1000, 10000}) {
        double v = zeta_partial(F, 1.5, {2}, X).real();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("class-number-formula residue") {
    // L(1, chi_-4) = pi/4, L(1, chi_5) = 2 log(golden ratio)/sqrt 5
    CHECK(std::abs(quadratic_L1(-4) - kPi / 4) < 1e-14);
    CHECK(std::abs(quadratic_L1(5) - 2 * std::log((1 + std::sqrt(5.0)) / 2) / std::sqrt(5.0)) < 1e-14);
    CHECK(std::abs(BaseField::quadratic(-1).zeta_residue - kPi / 4) < 1e-14);
}
