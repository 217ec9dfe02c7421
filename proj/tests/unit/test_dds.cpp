#include <doctest.h>

#include <cmath>
#include <random>

#include "ddslab/dds.hpp"
#include "ddslab/ringarith.hpp"

using namespace ddslab;
using namespace ddslab::dds;

namespace {

const SymbolContext& qctx() {
    static SymbolContext c = quadchar::build_context(ringarith::BaseField::rational());
    return c;
}

const CoefficientSystem& sym2() {
    static CoefficientSystem s = lseries::sym2_delta(3000);
    return s;
}

const CorrectionCache& cache() {
    static CorrectionCache cc(sym2());
    return cc;
}

TruncationSpec box(u64 xd, u64 xn) {
    TruncationSpec t;
    t.X_D = xd;
    t.X_N = xn;
    return t;
}

// squarefree kernel by trial division, independent of the library splitter
u64 kernel0(u64 n) {
    u64 k = 1;
    for (u64 p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e % 2) k *= p;
    }
    return k * n;
}

bool squarefree(u64 n) {
    for (u64 p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

cplx npow(u64 n, cplx z) { return std::exp(-z * std::log(static_cast<double>(n))); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

int class_char(const ClassCharacter& ch, u64 n) { return ch(qctx().class_of(n)); }

}  // namespace

TEST_CASE("truncation spec validation") {
    TruncationSpec t = box(0, 10);
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = box(10, 10);
    t.tolerance = 0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    CHECK_NOTHROW(box(1, 1).validate());
}

TEST_CASE("Z_pure: X_D = 1 is the untwisted partial L") {
    cplx s(2.5, 0.3), w(2.2, -0.1);
    auto v = Z_pure(s, w, sym2(), qctx(), box(1, 800));
    cplx direct = 0.0;
    for (u64 n = 1; n <= 800; n += 2) direct += sym2().coeff(n) * npow(n, s);
    CHECK(rel(v.value, direct) < 1e-13);
    CHECK(v.terms == 1);
}

TEST_CASE("Z_pure: trivial coefficients against a brute-force double loop") {
    const u64 X = 500;
    CoeffTable ones(X + 1, 1.0);
    cplx s(2.1, 0.5), w(2.3, -0.7);
    cplx brute = 0.0;
    for (u64 D = 1; D <= X; D += 2) {
        i64 d0 = static_cast<i64>(kernel0(D));
        cplx inner = 0.0;
        for (u64 N = 1; N <= X; N += 2) inner += static_cast<double>(jacobi(d0, N)) * npow(N, s);
        brute += npow(D, w) * inner;
    }
    for (auto ord : {Order::DFirst, Order::NFirst}) {
        auto t = box(X, X);
        t.order = ord;
        CAPTURE(order_name(ord));
        CHECK(rel(Z_pure(s, w, ones, qctx(), t).value, brute) < 1e-13);
    }
}

TEST_CASE("Z_pure: both orders agree on a grid with Re >= 2") {
    for (double sr : {2.0, 2.5, 3.0})
        for (double wr : {2.0, 2.5, 3.0}) {
            cplx s(sr, 1.3), w(wr, -0.4);
            auto t = box(1500, 1500);
            auto a = Z_pure(s, w, sym2(), qctx(), t);
            t.order = Order::NFirst;
            auto b = Z_pure(s, w, sym2(), qctx(), t);
            CAPTURE(sr);
            CAPTURE(wr);
            CHECK(std::abs(a.value - b.value) < 1e-12);
            CHECK(std::isfinite(a.tail));
            CHECK(std::isfinite(a.last_term));
        }
}

TEST_CASE("Z_pure: tail above tolerance marks the value partial") {
    auto t = box(20, 20);
    t.tolerance = 1e-12;
    auto v = Z_pure(cplx(1.5), cplx(1.5), sym2(), qctx(), t);
    CHECK(v.partial);
    CHECK(v.tail > 1e-12);
}

TEST_CASE("Z_star: single term at X_D = 1") {
    auto tr = Twist::trivial(qctx());
    auto v = Z_star(2.5, 2.5, sym2(), qctx(), tr, tr, box(1, 600));
    auto p = Z_pure(2.5, 2.5, sym2(), qctx(), box(1, 600));
    CHECK(rel(v.value, p.value) < 1e-13);
}

TEST_CASE("Z_star: brute force over squarefree odd D, N <= 300") {
    const auto& ctx = qctx();
    auto chars = ctx.characters();
    for (auto [ia, ib] : {std::pair{0, 0}, std::pair{1, 2}, std::pair{3, 3}}) {
        const auto& ca = chars[ia];
        const auto& cb = chars[ib];
        cplx s = 2.5, w = 2.5;
        cplx brute = 0.0;
        for (u64 D = 1; D <= 300; D += 2) {
            if (!squarefree(D)) continue;
            cplx inner = 0.0;
            for (u64 N = 1; N <= 300; N += 2)
                inner += sym2().coeff(N) * static_cast<double>(class_char(ca, N) * jacobi(static_cast<i64>(D), N)) *
                         npow(N, s);
            brute += static_cast<double>(class_char(cb, D)) * npow(D, w) * inner;
        }
        auto v = Z_star(s, w, sym2(), ctx, Twist::character(ca, ctx), Twist::character(cb, ctx), box(300, 300));
        CAPTURE(ia);
        CAPTURE(ib);
        CHECK(std::abs(v.value - brute) < 1e-12);
    }
}

TEST_CASE("Z_star: class partition") {
    const auto& ctx = qctx();
    auto tr = Twist::trivial(ctx);
    cplx s(2.2, 0.4), w(2.4, 1.1);
    for (u64 X : {1, 37, 400}) {
        auto whole = Z_star(s, w, sym2(), ctx, tr, tr, box(X, 400));
        cplx parts = 0.0;
        for (int e = 0; e < ctx.h_C; ++e) {
            auto E = quadchar::RayClass::from_index(e, ctx.k());
            parts += Z_star(s, w, sym2(), ctx, tr, Twist::delta(E, ctx), box(X, 400)).value;
        }
        CHECK(std::abs(whole.value - parts) < 1e-14);
    }
}

TEST_CASE("Z_r and Z_(l)") {
    const auto& ctx = qctx();
    cplx s(2.3, 0.2), w(2.1, -0.3);
    auto t = box(1200, 1200);
    auto tr = Twist::trivial(ctx);

    SUBCASE("r = 1 is the corrected series") {
        SeriesRequest req;
        req.s = s;
        req.w = w;
        req.alpha = tr;
        req.beta = tr;
        auto full = corrected_Z(req, sym2(), cache(), ctx, t);
        auto z1 = Z_r(s, w, sym2(), cache(), ctx, 1, t);
        CHECK(std::abs(full.value - z1.value) == doctest::Approx(0.0));
    }
    SUBCASE("Z_r as a Moebius combination of Z_(l), r = 15") {
        auto zr = Z_r(s, w, sym2(), cache(), ctx, 15, t);
        cplx comb = 0.0;
        for (u64 l : {1, 3, 5, 15})
            comb += static_cast<double>(ringarith::moebius_u64(l)) * Z_paren_l(s, w, sym2(), cache(), ctx, l, t).value;
        CHECK(std::abs(zr.value - comb) < 1e-13);
    }
    SUBCASE("sum of mu(r) Z_r reaches Z_star once R^2 >= X_D") {
        auto star = Z_star(s, w, sym2(), ctx, tr, tr, t).value;
        cplx acc = 0.0;
        double err_small = 0;
        for (u64 r = 1; r * r <= t.X_D; r += 2) {
            int mu = ringarith::moebius_u64(r);
            if (mu) acc += static_cast<double>(mu) * Z_r(s, w, sym2(), cache(), ctx, r, t).value;
            if (r == 3) err_small = std::abs(acc - star);
        }
        CHECK(err_small > 1e-6);
        CHECK(std::abs(acc - star) < 1e-13);
    }
    SUBCASE("non-squarefree r is rejected") {
        CHECK_THROWS_AS(Z_r(s, w, sym2(), cache(), ctx, 9, t), DomainError);
        CHECK_THROWS_AS(Z_paren_l(s, w, sym2(), cache(), ctx, 45, t), DomainError);
    }
}

TEST_CASE("sieve identities") {
    SUBCASE("indicator of 9") {
        auto c = sieve_identity_check({{9, Rational(1)}}, 3);
        CHECK(c.ok);
        CHECK(c.mobius_lhs == 0);
        CHECK(c.squarefree_rhs == 0);
        CHECK(c.zr_lhs == 1);
    }
    SUBCASE("indicator of 15") {
        Rational v(7, 3);
        auto c = sieve_identity_check({{15, v}}, 1);
        CHECK(c.ok);
        CHECK(c.mobius_lhs == v);
        CHECK(c.squarefree_rhs == v);
    }
    SUBCASE("random rational functions") {
        std::mt19937_64 rng(20261017);
        std::uniform_int_distribution<u64> norm(0, 4999), len(1, 60);
        std::uniform_int_distribution<int> num(-50, 50), den(1, 30);
        const u64 rs[] = {1, 3, 5, 15, 21, 105, 1155};
        for (int trial = 0; trial < 100; ++trial) {
            IdealFunction f;
            u64 n = len(rng);
            for (u64 i = 0; i < n; ++i) f[2 * norm(rng) + 1] = Rational(num(rng), den(rng));
            // bias toward non-squarefree support
            f[9 * (2 * norm(rng) % 1111 + 1)] = Rational(num(rng), den(rng));
            u64 r = rs[trial % 7];
            auto c = sieve_identity_check(f, r);
            CAPTURE(trial);
            CHECK(c.ok);
        }
    }
    CHECK_THROWS_AS(sieve_identity_check({{1, Rational(1)}}, 9), DomainError);
}

TEST_CASE("correction solver") {
    const auto& g = sym2();
    SUBCASE("normalization and low-degree closed forms") {
        for (u64 P : {3, 5, 7, 101}) {
            auto lc = solve_correction_local(P, g);
            const double p = static_cast<double>(P);
            auto h = lseries::h_series(g.satake(P), 2);
            CHECK(lc.A[0].size() == 1);
            CHECK(lc.A[0][0] == cplx(1.0));
            CHECK(lc.A[1][0] == cplx(1.0));
            CHECK(lc.a_side().at(0, 0) == cplx(1.0));
            CHECK(lc.b_side().at(0, 0) == cplx(1.0));
            // degree-two rows by hand: B_2 = h2 (1 - Y + p Y^2), A_2 = 1 - h1 X + (p h2 - h2 + h1^2) X^2 + ...
            REQUIRE(lc.B[2].size() == 3);
            CHECK(std::abs(lc.B[2][0] - h[2]) < 1e-12);
            CHECK(std::abs(lc.B[2][1] + h[2]) < 1e-12);
            CHECK(std::abs(lc.B[2][2] - p * h[2]) < 1e-12 * p);
            REQUIRE(lc.A[2].size() == 7);
            CHECK(std::abs(lc.A[2][1] + h[1]) < 1e-12);
            cplx a22 = p * h[2] - h[2] + h[1] * h[1];
            CHECK(std::abs(lc.A[2][2] - a22) < 1e-12 * p);
            CHECK(std::abs(lc.A[2][4] - p * a22) < 1e-12 * p * p);
            CHECK(std::abs(lc.A[2][5] + p * p * h[1]) < 1e-12 * p * p);
            CHECK(std::abs(lc.A[2][6] - p * p * p) < 1e-12 * p * p * p);
            CHECK(lc.rank_deficiency == 0);
        }
    }
    SUBCASE("both functional equations at random points") {
        for (u64 P : {3, 11, 199, 997}) {
            auto r = correction_fe_residual(solve_correction_local(P, g), 10, P);
            CAPTURE(P);
            CHECK(r.a_side < 1e-10);
            CHECK(r.b_side < 1e-10);
        }
        auto r = correction_fe_residual(solve_correction_local(5, Satake{1.0, 1.0, 1.0}), 10, 5);
        CHECK(r.a_side < 1e-12);
        CHECK(r.b_side < 1e-12);
    }
    SUBCASE("inconsistent Satake input is reported") {
        Satake bad{std::polar(1.0, 0.3), std::polar(1.0, 0.5), std::polar(1.0, -0.8)};
        CHECK_THROWS_AS(solve_correction_local(5, bad), NumericError);
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(solve_correction_local(9, Satake{1.0, 1.0, 1.0}), DomainError);
        CHECK_THROWS_AS(solve_correction_local(2, Satake{1.0, 1.0, 1.0}), DomainError);
        auto lc = solve_correction_local(3, g);
        CHECK_THROWS_AS(lc.a_value(7, 0.1), DomainError);
    }
    SUBCASE("cache returns one shared object per prime") {
        auto a = cache().get(7);
        auto b = cache().get(7);
        CHECK(a.get() == b.get());
    }
}

TEST_CASE("correction factor bound gates on samples") {
    const auto& ctx = qctx();
    auto tr = Twist::trivial(ctx);
    auto chars = ctx.characters();
    const double C_half = 3.0, eps = 0.01, C_right = 2.0;
    for (auto p : primes_up_to(1000)) {
        if (p < 3) continue;
        for (u64 d0 : {1, 3, 7}) {
            if (d0 == p) continue;
            for (int e : {1, 2}) {
                if (e == 2 && p > 60) continue;
                u64 D1 = ipow(p, e);
                u64 D = d0 * D1 * D1;
                for (const auto& tw : {tr, Twist::character(chars[2], ctx)}) {
                    double half = std::abs(a_factor(0.5, D, tw, cache(), ctx));
                    CHECK(half <= C_half * std::pow(static_cast<double>(D1), 5.0 / 7 + eps));
                    CHECK(std::abs(a_factor(cplx(1.05, 3.0), D, tw, cache(), ctx)) <= C_right);
                }
            }
        }
        if (p > 3) CHECK(a_factor(0.5, 3 * p, tr, cache(), ctx) == cplx(1.0));
    }
}

TEST_CASE("basic identity") {
    const auto& ctx = qctx();
    SUBCASE("sym2 at (2.5, 2.5), X = 2000") {
        SeriesRequest req;
        req.alpha = Twist::trivial(ctx);
        req.beta = Twist::trivial(ctx);
        auto c = basic_identity_check(req, sym2(), cache(), ctx, box(2000, 2000), 1e-5);
        CHECK(c.ok);
        CHECK(c.residual < 1e-5);
    }
    SUBCASE("all character pairs at complex points") {
        auto chars = ctx.characters();
        for (const auto& a : chars)
            for (const auto& b : chars) {
                SeriesRequest req;
                req.s = {2.2, 0.3};
                req.w = {2.1, -0.4};
                req.alpha = Twist::character(a, ctx);
                req.beta = Twist::character(b, ctx);
                auto c = basic_identity_check(req, sym2(), cache(), ctx, box(400, 400), 1e-10);
                CAPTURE(a.str());
                CAPTURE(b.str());
                CHECK(c.residual < 1e-12);
            }
    }
    SUBCASE("single-prime support is exact to solver precision") {
        for (u64 P : {3, 5, 7}) {
            SeriesRequest req;
            req.s = {0.7, 1.0};
            req.w = {0.3, -2.0};
            req.alpha = Twist::trivial(ctx);
            req.beta = Twist::trivial(ctx);
            req.support_prime = P;
            auto c = basic_identity_check(req, sym2(), cache(), ctx, box(2000, 2000), 1e-10);
            CAPTURE(P);
            CHECK(c.residual < 1e-12);
        }
    }
}

TEST_CASE("Euler-factor rearrangement") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
        cplx g(u(rng), u(rng)), x(u(rng), u(rng));
        for (int chi : {1, -1}) {
            cplx lhs = (1.0 - g * g * x * x) / (1.0 - g * static_cast<double>(chi) * x);
            CHECK(std::abs(lhs - (1.0 + g * static_cast<double>(chi) * x)) < 1e-14);
        }
    }
    const auto& ctx = qctx();
    auto tr = Twist::trivial(ctx);
    for (u64 l : {3, 15}) {
        auto c = zl_expansion_check(2.5, 2.5, sym2(), cache(), ctx, l, tr, tr, box(2000, 2000), 1e-6);
        CAPTURE(l);
        CHECK(c.ok);
        CHECK(c.residual < 1e-6);
    }
    auto chars = ctx.characters();
    auto c = zl_expansion_check({2.1, 1.0}, {2.3, -1.0}, sym2(), cache(), ctx, 15, Twist::character(chars[1], ctx),
                                Twist::character(chars[3], ctx), box(800, 800), 1e-6);
    CHECK(c.residual < 1e-12);
}

TEST_CASE("refined functional equation expansions") {
    const auto& ctx = qctx();
    auto chars = ctx.characters();
    auto gam = [](u64 p) { return sym2().satake(p); };
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> re(-1.0, 2.0), im(-4.0, 4.0);

    SUBCASE("r = 1 is a single unit term") {
        for (auto side : {Side::Phi, Side::Psi}) {
            auto ex = refined_fe_expand(1, chars[1], side, ctx);
            REQUIRE(ex.terms.size() == 1);
            CHECK(ex.coefficient(ex.terms[0], cplx(0.3, 2.0), [](u64) { return 1; }, gam) == cplx(1.0));
        }
    }
    SUBCASE("psi side, r = 3") {
        const auto& beta = chars[2];
        auto ex = refined_fe_expand(3, beta, Side::Psi, ctx);
        CHECK(ex.f_r == 1);
        REQUIRE(ex.terms.size() == 4);
        auto bval = [&](u64 p) { return class_char(beta, p); };
        cplx w(0.4, 1.7);
        double b3 = bval(3);
        for (const auto& t : ex.terms) {
            cplx expect = 1.0;
            if (t.l[0] == 3) expect *= -b3 * npow(3, w);
            if (t.m[0] == 3) expect *= b3 * npow(3, 1.0 - w);
            CHECK(std::abs(ex.coefficient(t, w, bval, gam) - expect) < 1e-15);
        }
        for (int chiD : {1, -1}) {
            auto cD = [chiD](u64) { return chiD; };
            for (int i = 0; i < 10; ++i) {
                cplx z(re(rng), im(rng));
                double c = b3 * chiD;
                cplx prod = (1.0 - c * npow(3, z)) * (1.0 + c * npow(3, 1.0 - z));
                CHECK(rel(ex.evaluate(z, bval, gam, cD), prod) < 1e-13);
                CHECK(rel(ex.evaluate(z, bval, gam, cD), ex.closed_form(z, bval, gam, cD)) < 1e-13);
            }
        }
    }
    SUBCASE("phi side, r = 3 and r = 15") {
        for (u64 r : {3, 15}) {
            auto ex = refined_fe_expand(r, chars[3], Side::Phi, ctx);
            CHECK(ex.terms.size() == (r == 3 ? 64u : 4096u));
            auto aval = [&](u64 p) { return class_char(chars[3], p); };
            for (int chi3 : {1, -1})
                for (int chi5 : {1, -1}) {
                    auto cD = [=](u64 p) { return p == 3 ? chi3 : chi5; };
                    for (int i = 0; i < 5; ++i) {
                        cplx z(re(rng), im(rng));
                        cplx prod = 1.0;
                        for (u64 p : ex.primes)
                            for (auto g : gam(p)) {
                                cplx cg = static_cast<double>(aval(p) * cD(p)) * g;
                                prod *= (1.0 + cg * npow(p, 1.0 - z)) * (1.0 - cg * npow(p, z));
                            }
                        CHECK(rel(ex.evaluate(z, aval, gam, cD), prod) < 1e-12);
                        CHECK(rel(ex.evaluate(z, aval, gam, cD), ex.closed_form(z, aval, gam, cD)) < 1e-12);
                    }
                }
        }
    }
    CHECK_THROWS_AS(refined_fe_expand(9, chars[0], Side::Psi, ctx), DomainError);
}

TEST_CASE("termwise functional equations") {
    const auto& ctx = qctx();
    auto chars = ctx.characters();
    FeTerm t;
    SUBCASE("GL(1) term M = 5 at w = 0.6") {
        t.degree = 1;
        t.n = 5;
        t.chi = chars[0];
        auto r = fe_termwise_check(t, 0.6, &sym2(), &cache(), ctx);
        CHECK(r.residual < 1e-6);
        CHECK_FALSE(r.flagged);
    }
    SUBCASE("GL(1) term with square part, M = 45") {
        t.degree = 1;
        t.n = 45;
        t.chi = chars[1];
        CHECK(fe_termwise_check(t, cplx(0.6, 0.5), &sym2(), &cache(), ctx).residual < 1e-6);
    }
    SUBCASE("squarefree D, plain FE") {
        t.degree = 3;
        t.n = 5;
        t.chi = chars[0];
        CHECK(fe_termwise_check(t, 0.6, &sym2(), &cache(), ctx).residual < 1e-6);
    }
    SUBCASE("D with D1 = 3") {
        t.degree = 3;
        t.n = 45;
        t.chi = chars[1];
        CHECK(fe_termwise_check(t, cplx(0.6, 0.5), &sym2(), &cache(), ctx).residual < 1e-6);
    }
    SUBCASE("centre, trivial class") {
        t.degree = 1;
        t.n = 1;
        t.chi = chars[0];
        CHECK(fe_termwise_check(t, 0.5, &sym2(), &cache(), ctx).residual < 1e-9);
    }
    SUBCASE("even ideal is rejected") {
        t.n = 6;
        CHECK_THROWS_AS(fe_termwise_check(t, 0.6, &sym2(), &cache(), ctx), DomainError);
    }
}
