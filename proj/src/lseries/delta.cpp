#include <algorithm>
#include <cmath>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

namespace {

using u32 = std::uint32_t;

template <u32 MOD, u32 ROOT>
struct Ntt {
    static u32 mul(u32 a, u32 b) { return static_cast<u32>(static_cast<u64>(a) * b % MOD); }
    static u32 add(u32 a, u32 b) {
        u64 s = static_cast<u64>(a) + b;
        return static_cast<u32>(s >= MOD ? s - MOD : s);
    }
    static u32 sub(u32 a, u32 b) { return a >= b ? a - b : static_cast<u32>(static_cast<u64>(a) + MOD - b); }
    static u32 pw(u32 b, u64 e) { return static_cast<u32>(powmod(b, e, MOD)); }

    static void transform(std::vector<u32>& a, bool inverse) {
        const std::size_t n = a.size();
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        std::vector<u32> w;
        for (std::size_t len = 2; len <= n; len <<= 1) {
            u32 wl = pw(ROOT, (MOD - 1) / len);
            if (inverse) wl = pw(wl, MOD - 2);
            const std::size_t half = len / 2;
            w.assign(half, 1);
            for (std::size_t k = 1; k < half; ++k) w[k] = mul(w[k - 1], wl);
            for (std::size_t i = 0; i < n; i += len)
                for (std::size_t k = 0; k < half; ++k) {
                    u32 u = a[i + k], v = mul(a[i + k + half], w[k]);
                    a[i + k] = add(u, v);
                    a[i + k + half] = sub(u, v);
                }
        }
        if (inverse) {
            u32 ninv = pw(static_cast<u32>(n % MOD), MOD - 2);
            for (auto& x : a) x = mul(x, ninv);
        }
    }

    // Truncated square of a polynomial of length K, in place.
    static void square_trunc(std::vector<u32>& a, std::size_t K) {
        std::size_t n = 1;
        while (n < 2 * K) n <<= 1;
        a.resize(n, 0);
        transform(a, false);
        for (auto& x : a) x = mul(x, x);
        transform(a, true);
        a.resize(K);
        a.shrink_to_fit();
    }

    // prod (1 - q^n)^24 mod MOD, first K coefficients, from the exact 6th power.
    static std::vector<u32> eta24(const std::vector<i64>& e6, std::size_t K) {
        std::vector<u32> a(K);
        for (std::size_t i = 0; i < K; ++i) {
            i64 r = e6[i] % static_cast<i64>(MOD);
            a[i] = static_cast<u32>(r < 0 ? r + MOD : r);
        }
        square_trunc(a, K);
        square_trunc(a, K);
        return a;
    }
};

constexpr u32 kMods[5] = {2013265921u, 2281701377u, 3892314113u, 3489660929u, 3221225473u};

// prod (1 - q^n)^6 exactly, as the square of Jacobi's series for prod (1 - q^n)^3.
std::vector<i64> eta6(std::size_t K) {
    std::vector<std::pair<std::size_t, i64>> e3;
    for (u64 m = 0;; ++m) {
        std::size_t k = m * (m + 1) / 2;
        if (k >= K) break;
        e3.push_back({k, (m % 2 ? -1 : 1) * static_cast<i64>(2 * m + 1)});
    }
    std::vector<i64> out(K, 0);
    for (std::size_t i = 0; i < e3.size(); ++i)
        for (std::size_t j = 0; j < e3.size() && e3[i].first + e3[j].first < K; ++j)
            out[e3[i].first + e3[j].first] += e3[i].second * e3[j].second;
    return out;
}

struct Residues {
    std::vector<std::vector<u32>> r;
};

Residues eta24_residues(std::size_t K) {
    auto e6 = eta6(K);
    Residues R;
    R.r.push_back(Ntt<kMods[0], 31>::eta24(e6, K));
    R.r.push_back(Ntt<kMods[1], 3>::eta24(e6, K));
    R.r.push_back(Ntt<kMods[2], 3>::eta24(e6, K));
    R.r.push_back(Ntt<kMods[3], 3>::eta24(e6, K));
    R.r.push_back(Ntt<kMods[4], 5>::eta24(e6, K));
    return R;
}

// Mixed-radix digits of the residue vector (Garner). Returns sign and digits of |x|.
struct Garner {
    u64 inv[5][5];
    Garner() {
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                inv[i][j] = i == j ? 0 : powmod(kMods[i] % kMods[j], kMods[j] - 2, kMods[j]);
    }
    void digits(const u32 res[5], u64 d[5]) const {
        for (int i = 0; i < 5; ++i) {
            u64 m = kMods[i];
            u64 x = res[i];
            // x <- (x - d0 - d1 m0 - ...) / (m0 ... m_{i-1}) mod m_i
            for (int j = 0; j < i; ++j) x = (x + m - d[j] % m) % m * inv[j][i] % m;
            d[i] = x;
        }
    }
    // Signed value from residues; |value| must be far below half the modulus product.
    bool decode(const u32 res[5], u64 d[5]) const {
        digits(res, d);
        if (d[4] < kMods[4] / 2) return false;
        u32 neg[5];
        for (int i = 0; i < 5; ++i) neg[i] = res[i] == 0 ? 0 : kMods[i] - res[i];
        digits(neg, d);
        return true;
    }
};

}  // namespace

std::string int128_str(__int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    std::string s;
    while (u) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

std::vector<__int128> delta_qexp(u64 K) {
    if (K < 1) throw DomainError("delta_qexp: K must be >= 1");
    // |tau(n)| < d(n) n^{11/2} stays below 2^127 up to here
    if (K > 2000000) throw DomainError("delta_qexp: exact output limited to K <= 2000000");
    auto R = eta24_residues(K);
    Garner G;
    std::vector<__int128> tau(K + 1, 0);
    for (u64 n = 1; n <= K; ++n) {
        u32 res[5];
        for (int i = 0; i < 5; ++i) res[i] = R.r[i][n - 1];
        u64 d[5];
        bool neg = G.decode(res, d);
        __int128 v = 0;
        for (int i = 4; i >= 0; --i) v = v * kMods[i] + d[i];
        tau[n] = neg ? -v : v;
    }
    return tau;
}

std::vector<HeckeEigen> delta_eigenvalues(u64 P) {
    if (P < 2) return {};
    auto R = eta24_residues(P);
    Garner G;
    std::vector<HeckeEigen> out;
    for (auto p : primes_up_to(P)) {
        u32 res[5];
        for (int i = 0; i < 5; ++i) res[i] = R.r[i][p - 1];
        u64 d[5];
        bool neg = G.decode(res, d);
        long double v = 0;
        for (int i = 4; i >= 0; --i) v = v * kMods[i] + d[i];
        long double a = v / std::pow(static_cast<long double>(p), 5.5L);
        out.push_back({p, static_cast<double>(neg ? -a : a)});
    }
    return out;
}

}  // namespace ddslab::lseries
