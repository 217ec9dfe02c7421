#include "ddslab/common.hpp"

#include <cmath>

namespace ddslab {

u64 checked_mul(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw NumericError("integer overflow in norm arithmetic");
    return r;
}

u64 ipow(u64 b, unsigned e) {
    u64 r = 1;
    while (e--) r = checked_mul(r, b);
    return r;
}

u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

int jacobi(i64 a, u64 n) {
    if (n == 0 || (n & 1) == 0) throw DomainError("jacobi: modulus must be odd and positive");
    i64 m = static_cast<i64>(n);
    a %= m;
    if (a < 0) a += m;
    u64 x = static_cast<u64>(a);
    int t = 1;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            u64 r = n & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, n);
        if ((x & 3) == 3 && (n & 3) == 3) t = -t;
        x %= n;
    }
    return n == 1 ? t : 0;
}

int kronecker(i64 a, u64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int t = 1;
    while ((n & 1) == 0) {
        n >>= 1;
        if ((a & 1) == 0) return 0;
        i64 r = ((a % 8) + 8) % 8;
        if (r == 3 || r == 5) t = -t;
    }
    if (n == 1) return t;
    return t * jacobi(a, n);
}

u64 powmod(u64 b, u64 e, u64 m) {
    unsigned __int128 r = 1, x = b % m;
    while (e) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<u64>(r);
}

Sieve::Sieve(u64 limit) : limit_(limit), spf_(limit + 1, 0) {
    for (u64 i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes_) {
            u64 q = p * i;
            if (p > spf_[i] || q > limit) break;
            spf_[q] = p;
        }
    }
}

std::vector<std::pair<u64, int>> Sieve::factor(u64 n) const {
    std::vector<std::pair<u64, int>> out;
    if (n > limit_) return factor_trial(n);
    while (n > 1) {
        u64 p = spf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

std::vector<std::uint32_t> primes_up_to(u64 limit) {
    std::vector<char> comp(limit + 1, 0);
    std::vector<std::uint32_t> out;
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (u64 j = i * i; j <= limit; j += i) comp[j] = 1;
    }
    return out;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = static_cast<u64>(static_cast<unsigned __int128>(x) * x % n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

std::vector<std::pair<u64, int>> factor_trial(u64 n) {
    std::vector<std::pair<u64, int>> out;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

}  // namespace ddslab
