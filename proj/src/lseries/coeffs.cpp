#include <algorithm>
#include <cmath>
#include <random>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

std::array<cplx, 3> elementary(const Satake& g) {
    return {g[0] + g[1] + g[2], g[0] * g[1] + g[1] * g[2] + g[0] * g[2], g[0] * g[1] * g[2]};
}

std::vector<cplx> h_series(const Satake& g, int K) {
    auto e = elementary(g);
    std::vector<cplx> h(K + 1, 0.0);
    h[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
        cplx v = e[0] * h[k - 1];
        if (k >= 2) v -= e[1] * h[k - 2];
        if (k >= 3) v += e[2] * h[k - 3];
        h[k] = v;
    }
    return h;
}

CoefficientSystem::CoefficientSystem(std::string lbl, std::vector<std::uint32_t> primes, std::vector<Satake> satake)
    : label(std::move(lbl)), primes_(std::move(primes)), satake_(std::move(satake)) {
    if (primes_.size() != satake_.size()) throw DomainError("coefficient system: prime/Satake length mismatch");
    if (!std::is_sorted(primes_.begin(), primes_.end())) throw DomainError("coefficient system: primes not sorted");
}

void CoefficientSystem::validate() const {
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const auto& g = satake_[i];
        double p = primes_[i];
        if (std::abs(g[0] * g[1] * g[2] - 1.0) > 1e-9)
            throw DomainError("Satake product != 1 at p = " + std::to_string(primes_[i]));
        double bound = std::pow(p, 5.0 / 14.0) * (1 + 1e-9);
        for (const auto& x : g)
            if (std::abs(x) > bound) throw DomainError("Satake parameter exceeds p^{5/14} at p = " + std::to_string(primes_[i]));
        if (self_dual) {
            std::array<bool, 3> used{};
            for (const auto& x : g) {
                bool found = false;
                for (int j = 0; j < 3 && !found; ++j)
                    if (!used[j] && std::abs(1.0 / x - g[j]) < 1e-9) used[j] = found = true;
                if (!found) throw DomainError("self-dual flag but Satake multiset not closed under inversion at p = " +
                                              std::to_string(primes_[i]));
            }
        }
    }
}

std::size_t CoefficientSystem::index_of(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) throw DomainError("no Satake data at p = " + std::to_string(p));
    return static_cast<std::size_t>(it - primes_.begin());
}

bool CoefficientSystem::has_prime(u64 p) const { return std::binary_search(primes_.begin(), primes_.end(), p); }

const Satake& CoefficientSystem::satake(u64 p) const {
    if (std::find(ramified.begin(), ramified.end(), p) != ramified.end())
        throw DomainError("prime " + std::to_string(p) + " is ramified for " + label);
    return satake_[index_of(p)];
}

void CoefficientSystem::set_satake(u64 p, const Satake& g) { satake_[index_of(p)] = g; }

cplx CoefficientSystem::coeff_prime_power(u64 p, int k) const { return h_series(satake(p), k)[k]; }

cplx CoefficientSystem::coeff(u64 n) const {
    cplx v = 1.0;
    for (auto [p, e] : factor_trial(n)) v *= coeff_prime_power(p, e);
    return v;
}

cplx CoefficientSystem::coeff(const IdealRec& N) const {
    cplx v = 1.0;
    for (auto& [P, e] : N.factors) {
        if (P.norm != P.p) throw DomainError("coefficient system is defined over Q");
        v *= coeff_prime_power(P.p, e);
    }
    return v;
}

std::vector<cplx> CoefficientSystem::coefficient_table(u64 N) const {
    if (N > max_prime() && N > 1) throw DomainError("coefficient table beyond stored primes");
    std::vector<cplx> a(N + 1, 1.0);
    a[0] = 0.0;
    for (std::size_t i = 0; i < primes_.size() && primes_[i] <= N; ++i) {
        u64 p = primes_[i];
        int kmax = 0;
        for (u64 pk = p; pk <= N; pk *= p) {
            ++kmax;
            if (pk > N / p) break;
        }
        auto h = h_series(satake_[i], kmax);
        u64 pk = p;
        for (int k = 1; k <= kmax; ++k, pk *= p)
            for (u64 j = pk; j <= N; j += pk)
                if ((j / pk) % p != 0) a[j] *= h[k];
    }
    return a;
}

std::vector<double> CoefficientSystem::real_coefficient_table(u64 N) const {
    if (N > max_prime() && N > 1) throw DomainError("coefficient table beyond stored primes");
    std::vector<double> a(N + 1, 1.0);
    a[0] = 0.0;
    for (std::size_t i = 0; i < primes_.size() && primes_[i] <= N; ++i) {
        u64 p = primes_[i];
        int kmax = 0;
        for (u64 pk = p; pk <= N; pk *= p) {
            ++kmax;
            if (pk > N / p) break;
        }
        auto h = h_series(satake_[i], kmax);
        for (auto& x : h)
            if (std::abs(x.imag()) > 1e-9 * (1 + std::abs(x))) throw DomainError("coefficients are not real for " + label);
        u64 pk = p;
        for (int k = 1; k <= kmax; ++k, pk *= p) {
            double hk = h[k].real();
            for (u64 j = pk; j <= N; j += pk)
                if ((j / pk) % p != 0) a[j] *= hk;
        }
    }
    return a;
}

cplx CoefficientSystem::sym2_coeff(u64 p) const {
    const auto& g = satake(p);
    cplx b = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) b += g[i] * g[j];
    return b;
}

std::array<cplx, 6> CoefficientSystem::sym2_satake(u64 p) const {
    const auto& g = satake(p);
    std::array<cplx, 6> out;
    int k = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) out[k++] = g[i] * g[j];
    return out;
}

double CoefficientSystem::max_entry_ratio() const {
    double m = 0;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        auto e = elementary(satake_[i]);
        m = std::max(m, std::abs(e[0]) / std::pow(static_cast<double>(primes_[i]), 3.0 / 8.0));
    }
    return m;
}

CoefficientSystem gl2_to_sym2(const std::vector<HeckeEigen>& ev, const std::string& label, std::vector<double> shifts) {
    std::vector<std::uint32_t> primes;
    std::vector<Satake> sat;
    for (const auto& [p, a] : ev) {
        if (std::abs(a) > 2 + 1e-12)
            throw DomainError("Hecke eigenvalue |a(" + std::to_string(p) + ")| > 2: non-tempered input unsupported");
        double ac = std::clamp(a, -2.0, 2.0);
        cplx alpha(ac / 2, std::sqrt(std::max(0.0, 1 - ac * ac / 4)));
        primes.push_back(p);
        sat.push_back({alpha * alpha, 1.0, std::conj(alpha) * std::conj(alpha)});
    }
    CoefficientSystem sys(label, std::move(primes), std::move(sat));
    sys.self_dual = true;
    sys.shifts = std::move(shifts);
    sys.conductor = 1;
    sys.root_number = 1.0;
    sys.validate();
    return sys;
}

CoefficientSystem synthetic_system(u64 max_prime, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    std::vector<std::uint32_t> primes = primes_up_to(max_prime);
    std::vector<Satake> sat;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        double t1 = u(rng), t2 = u(rng);
        sat.push_back({std::polar(1.0, t1), std::polar(1.0, t2), std::polar(1.0, -t1 - t2)});
    }
    CoefficientSystem sys("synthetic", std::move(primes), std::move(sat));
    sys.synthetic = true;
    sys.shifts = {0, 0, 0};
    sys.validate();
    return sys;
}

CoefficientSystem sym2_delta(u64 max_prime) {
    return gl2_to_sym2(delta_eigenvalues(max_prime), "sym2-Delta", {1, 11, 12});
}

}  // namespace ddslab::lseries
