#include <cmath>
#include <random>

#include "ddslab/dds.hpp"

namespace ddslab::dds {


cplx CorrectionPolynomial::eval(cplx X, cplx Y) const {
    cplx total = 0.0, xp = 1.0;
    for (const auto& row : c) {
        cplx acc = 0.0, yp = 1.0;
        for (const auto& v : row) {
            acc += v * yp;
            yp *= Y;
        }
        total += acc * xp;
        xp *= X;
    }
    return total;
}

CorrectionPolynomial LocalCorrection::a_side() const {
    CorrectionPolynomial cp;
    cp.P = P;
    std::size_t deg = 0;
    for (const auto& a : A) deg = std::max(deg, a.size());
    cp.c.assign(deg, std::vector<cplx>(A.size(), 0.0));
    for (std::size_t k = 0; k < A.size(); ++k)
        for (std::size_t i = 0; i < A[k].size(); ++i) cp.c[i][k] = A[k][i];
    return cp;
}

CorrectionPolynomial LocalCorrection::b_side() const {
    CorrectionPolynomial cp;
    cp.P = P;
    cp.c = B;
    return cp;
}

static cplx horner(const std::vector<cplx>& c, cplx x) {
    cplx v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

cplx LocalCorrection::a_value(int k, cplx X) const {
    if (k < 0 || k >= static_cast<int>(A.size()))
        throw DomainError("correction factor for P^" + std::to_string(k) + " at P = " + std::to_string(P) +
                          " beyond solved degree " + std::to_string(K));
    return horner(A[k], X);
}

cplx LocalCorrection::b_value(int l, cplx Y) const {
    if (l < 0 || l >= static_cast<int>(B.size()))
        throw DomainError("correction factor for P^" + std::to_string(l) + " at P = " + std::to_string(P) +
                          " beyond solved degree " + std::to_string(B.size() - 1));
    return horner(B[l], Y);
}

LocalCorrection solve_correction_local(u64 P, const Satake& gamma, int K) {
    if (P < 3 || P % 2 == 0 || !is_prime_u64(P)) throw DomainError("solve_correction_local: P must be an odd prime");
    if (K < 2 || K > 8) throw DomainError("solve_correction_local: K must lie in [2, 8]");
    const double p = static_cast<double>(P);
    const int L = 2 * K;
    auto h = lseries::h_series(gamma, L);

    // A[k] has degree 6m (m = k/2) with A[k][j] = A[k][6m-j] p^{j-3m}; B[l] has degree 2n
    // (n = l/2) with B[l][j] = B[l][2n-j] p^{j-n}. Coefficient rows (k, l) of
    //   sum_{k even} Y^k A_k(X) L(X) + sum_{k odd} Y^k A_k(X)
    //     = sum_{l even} X^l B_l(Y) / (1 - Y) + sum_{l odd} X^l B_l(Y)
    // taken in order of k then l introduce at most one new coefficient each.
    LocalCorrection lc;
    lc.P = P;
    lc.K = K;
    lc.A.assign(K + 1, {});
    lc.B.assign(L + 1, {});
    std::vector<std::vector<char>> a_known(K + 1), b_known(L + 1);
    for (int k = 0; k <= K; ++k) {
        lc.A[k].assign(6 * (k / 2) + 1, 0.0);
        a_known[k].assign(lc.A[k].size(), 0);
        lc.A[k][0] = 1.0;
        a_known[k][0] = 1;
    }
    for (int l = 0; l <= L; ++l) {
        lc.B[l].assign(2 * (l / 2) + 1, 0.0);
        b_known[l].assign(lc.B[l].size(), 0);
    }
    auto mirror_a = [&](int k, int j) {
        int m = k / 2, jj = 6 * m - j;
        if (jj != j && jj >= 0 && !a_known[k][jj]) {
            lc.A[k][jj] = lc.A[k][j] * std::pow(p, jj - 3 * m);
            a_known[k][jj] = 1;
        }
    };
    auto mirror_b = [&](int l, int j) {
        int n = l / 2, jj = 2 * n - j;
        if (jj != j && jj >= 0 && !b_known[l][jj]) {
            lc.B[l][jj] = lc.B[l][j] * std::pow(p, jj - n);
            b_known[l][jj] = 1;
        }
    };
    for (int k = 0; k <= K; ++k) mirror_a(k, 0);

    double worst = 0;
    for (int k = 0; k <= K; ++k) {
        for (int l = 0; l <= L; ++l) {
            // D-side minus M-side, with at most one unknown coefficient u of weight c
            cplx known = 0.0;
            double mag = 0;
            cplx* unknown = nullptr;
            cplx weight = 0.0;
            int uk = -1, uj = -1;
            bool is_a = false;
            auto term = [&](std::vector<cplx>& poly, std::vector<char>& flags, int j, cplx f, bool a_side, int idx) {
                if (j < 0 || j >= static_cast<int>(poly.size())) return;
                if (flags[j]) {
                    known += poly[j] * f;
                    mag = std::max(mag, std::abs(poly[j] * f));
                    return;
                }
                if (unknown) throw StructuralError("correction system: two new coefficients in one row");
                unknown = &poly[j];
                weight = f;
                uk = idx;
                uj = j;
                is_a = a_side;
            };
            if (k % 2 == 0) {
                for (int j = 0; j <= l; ++j) term(lc.A[k], a_known[k], j, h[l - j], true, k);
            } else {
                term(lc.A[k], a_known[k], l, 1.0, true, k);
            }
            if (l % 2 == 0) {
                for (int j = 0; j <= k; ++j) term(lc.B[l], b_known[l], j, -1.0, false, l);
            } else {
                term(lc.B[l], b_known[l], k, -1.0, false, l);
            }
            if (unknown) {
                *unknown = -known / weight;
                if (is_a) {
                    a_known[uk][uj] = 1;
                    mirror_a(uk, uj);
                } else {
                    b_known[uk][uj] = 1;
                    mirror_b(uk, uj);
                }
            } else {
                worst = std::max(worst, std::abs(known) / std::max(mag, 1.0));
            }
        }
    }
    int missing = 0;
    for (auto& f : a_known) for (char c : f) missing += !c;
    for (auto& f : b_known) for (char c : f) missing += !c;
    lc.rank_deficiency = missing;
    lc.residual = worst;
    if (missing != 0)
        throw NumericError("correction system at P = " + std::to_string(P) + " leaves " + std::to_string(missing) +
                           " coefficients undetermined");
    if (!(worst < 1e-9))
        throw NumericError("correction system at P = " + std::to_string(P) + " is inconsistent (residual " +
                           std::to_string(worst) + "); Satake input inconsistent");
    return lc;
}

LocalCorrection solve_correction_local(u64 P, const CoefficientSystem& sys, int K) {
    if (!sys.has_prime(P)) throw DomainError("solve_correction_local: no Satake data at " + std::to_string(P));
    for (auto q : sys.ramified)
        if (q == P) throw DomainError("solve_correction_local: " + std::to_string(P) + " is ramified");
    return solve_correction_local(P, sys.satake(P), K);
}

FeResidual correction_fe_residual(const LocalCorrection& lc, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-1.0, 2.0), im(-5.0, 5.0);
    const double p = static_cast<double>(lc.P);
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    FeResidual out;
    for (int t = 0; t < points; ++t) {
        cplx z(re(rng), im(rng));
        cplx x = std::pow(p, -z), xr = std::pow(p, z - 1.0);
        for (std::size_t k = 0; k < lc.A.size(); ++k) {
            double m = static_cast<double>(k / 2);
            cplx lhs = lc.a_value(static_cast<int>(k), x);
            cplx rhs = std::pow(p, 3.0 * m * (1.0 - 2.0 * z)) * lc.a_value(static_cast<int>(k), xr);
            out.a_side = std::max(out.a_side, rel(lhs, rhs));
        }
        for (std::size_t l = 0; l < lc.B.size(); ++l) {
            double n = static_cast<double>(l / 2);
            cplx lhs = lc.b_value(static_cast<int>(l), x);
            cplx rhs = std::pow(p, n * (1.0 - 2.0 * z)) * lc.b_value(static_cast<int>(l), xr);
            out.b_side = std::max(out.b_side, rel(lhs, rhs));
        }
    }
    return out;
}

std::shared_ptr<const LocalCorrection> CorrectionCache::get(u64 P) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(P);
        if (it != cache_.end()) return it->second;
    }
    auto lc = std::make_shared<const LocalCorrection>(solve_correction_local(P, sys_, K_));
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(P, std::move(lc)).first->second;
}

}  // namespace ddslab::dds
