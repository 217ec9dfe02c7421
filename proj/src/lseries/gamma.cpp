#include <cmath>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log(sin(pi z)) without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
    const cplx I(0, 1);
    double y = z.imag();
    if (std::abs(y) < 20) return std::log(std::sin(kPi * z));
    if (y > 0) return -I * kPi * z + std::log(1.0 - std::exp(2.0 * I * kPi * z)) - std::log(-2.0 * I);
    return I * kPi * z + std::log(1.0 - std::exp(-2.0 * I * kPi * z)) - std::log(2.0 * I);
}

}  // namespace

cplx log_gamma(cplx z) {
    if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

cplx log_gamma_R(cplx s) { return -0.5 * s * std::log(kPi) + log_gamma(0.5 * s); }

cplx riemann_zeta(cplx s) {
    if (s == cplx(1.0)) throw DomainError("zeta has a pole at 1");
    if (s.real() < 0.5) {
        // functional equation zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
        cplx one_s = 1.0 - s;
        return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(kPi * s / 2.0) * gamma_fn(one_s) *
               riemann_zeta(one_s);
    }
    static const double B2k[] = {1.0 / 6,         -1.0 / 30,     1.0 / 42,          -1.0 / 30,
                                 5.0 / 66,        -691.0 / 2730, 7.0 / 6,           -3617.0 / 510,
                                 43867.0 / 798,   -174611.0 / 330, 854513.0 / 138,   -236364091.0 / 2730};
    const int N = 30;
    CplxSum acc;
    for (int n = N - 1; n >= 1; --n) acc += std::pow(static_cast<double>(n), -s);
    double Nd = N;
    acc += std::pow(Nd, 1.0 - s) / (s - 1.0);
    acc += 0.5 * std::pow(Nd, -s);
    cplx rising = s;  // s (s+1) ... (s + 2k - 2)
    double fact = 2;  // (2k)!
    for (int k = 1; k <= 12; ++k) {
        acc += B2k[k - 1] / fact * rising * std::pow(Nd, -s - static_cast<double>(2 * k - 1));
        rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
        fact *= static_cast<double>((2 * k + 1) * (2 * k + 2));
    }
    return acc.value();
}

}  // namespace ddslab::lseries
