#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddslab {

using cplx = std::complex<double>;
using u64 = std::uint64_t;
using i64 = std::int64_t;

constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("E_CONFIG", m) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("E_DOMAIN", m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("E_NUMERIC", m) {}
};
struct StructuralError : Error {
    explicit StructuralError(const std::string& m) : Error("E_STRUCTURE", m) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& m) : Error("E_USAGE", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("E_IO", m) {}
};

// Neumaier compensated accumulator.
template <class T>
class CompSum {
public:
    void add(T x) {
        T t = sum_ + x;
        if (mag(sum_) >= mag(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompSum& operator+=(T x) {
        add(x);
        return *this;
    }
    T value() const { return sum_ + comp_; }

private:
    static double mag(double v) { return v < 0 ? -v : v; }
    static double mag(const cplx& v) { return std::abs(v.real()) + std::abs(v.imag()); }
    T sum_{};
    T comp_{};
};

// Component-wise variant for complex values; each part is compensated separately.
class CplxSum {
public:
    void add(cplx x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    CplxSum& operator+=(cplx x) {
        add(x);
        return *this;
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    CompSum<double> re_, im_;
};

u64 checked_mul(u64 a, u64 b);
u64 ipow(u64 b, unsigned e);
u64 gcd_u64(u64 a, u64 b);
u64 isqrt(u64 n);

// Jacobi symbol (a/n) for odd n > 0.
int jacobi(i64 a, u64 n);
// Kronecker symbol (a/n) for n > 0.
int kronecker(i64 a, u64 n);

u64 powmod(u64 b, u64 e, u64 m);

// Smallest-prime-factor table and prime list up to a bound.
class Sieve {
public:
    explicit Sieve(u64 limit);
    u64 limit() const { return limit_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }
    std::uint32_t spf(u64 n) const { return spf_[n]; }
    bool is_prime(u64 n) const { return n >= 2 && spf_[n] == n; }
    // (p, e) pairs in increasing p.
    std::vector<std::pair<u64, int>> factor(u64 n) const;

private:
    u64 limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

std::vector<std::uint32_t> primes_up_to(u64 limit);
bool is_prime_u64(u64 n);
std::vector<std::pair<u64, int>> factor_trial(u64 n);

}  // namespace ddslab
