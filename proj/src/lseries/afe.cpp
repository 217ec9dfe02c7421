#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

namespace {

cplx log_gamma_factor(const std::vector<double>& shifts, cplx s) {
    cplx v = 0.0;
    for (double mu : shifts) v += log_gamma_R(s + mu);
    return v;
}

std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double min_shift(const std::vector<double>& shifts) {
    double m = 1e300;
    for (double mu : shifts) m = std::min(m, mu);
    return m;
}

}  // namespace

cplx gamma_factor(const CompletedLParams& P, cplx s) { return std::exp(log_gamma_factor(P.shifts, s)); }

CompletedLParams gl1_params(i64 d) {
    CompletedLParams P;
    P.degree = 1;
    if (d == 1) {
        P.shifts = {0};
        P.poles = {{1.0, 1.0}, {0.0, -1.0}};
        return P;
    }
    if (!ringarith::is_fundamental_discriminant(d)) throw DomainError("gl1_params: " + std::to_string(d) + " is not a fundamental discriminant");
    P.shifts = {d > 0 ? 0.0 : 1.0};
    P.conductor = static_cast<double>(d > 0 ? d : -d);
    P.root_number = 1.0;
    return P;
}

CompletedLParams gl3_twist_params(const CoefficientSystem& sys, i64 d) {
    if (d != 1 && !ringarith::is_fundamental_discriminant(d))
        throw DomainError("gl3_twist_params: " + std::to_string(d) + " is not a fundamental discriminant");
    if (sys.shifts.size() != 3) throw ConfigError("gl3_twist_params: need three archimedean shifts for " + sys.label);
    u64 ad = static_cast<u64>(d > 0 ? d : -d);
    if (gcd_u64(ad, sys.conductor) != 1) throw DomainError("gl3_twist_params: twist conductor not coprime to c(pi)");
    CompletedLParams P;
    P.degree = 3;
    P.shifts = sys.shifts;
    if (d < 0) {
        // Gamma_C pairs (mu, mu + 1) are unchanged; a lone Gamma_R(s + mu) flips parity
        std::vector<double> sh = sys.shifts;
        std::sort(sh.begin(), sh.end());
        std::vector<bool> paired(3, false);
        for (int i = 2; i > 0; --i)
            for (int j = i - 1; j >= 0; --j)
                if (!paired[i] && !paired[j] && std::abs(sh[i] - sh[j] - 1) < 1e-12) paired[i] = paired[j] = true;
        for (int i = 0; i < 3; ++i)
            if (!paired[i]) {
                if (std::abs(sh[i]) < 1e-12) sh[i] = 1;
                else if (std::abs(sh[i] - 1) < 1e-12) sh[i] = 0;
                else throw ConfigError("gl3_twist_params: cannot flip parity of shift " + std::to_string(sh[i]));
            }
        P.shifts = sh;
    }
    P.conductor = static_cast<double>(sys.conductor) * std::pow(static_cast<double>(ad), 3);
    P.root_number = sys.root_number * static_cast<double>(kronecker(d, sys.conductor));
    return P;
}

KernelTable::KernelTable(const CompletedLParams& P, cplx s, const Smoothing& g, double y_min, double y_max,
                         double quad_step, double rel_tol, double log_step)
    : P_(P), s_(s), g_(g), h_(quad_step), tol_(rel_tol), y_min_(y_min), y_max_(y_max) {
    if (P.shifts.empty()) throw ConfigError("KernelTable: empty gamma factor");
    if (g.kind == Smoothing::Gaussian && g.lambda <= 0) throw NumericError("Gaussian weight needs lambda > 0");
    if (!(y_min > 0) || !(y_max > y_min)) throw DomainError("KernelTable: need 0 < y_min < y_max");
    double edge = s.real() + min_shift(P.shifts);  // first gamma pole sits at Re z = -edge
    if (edge <= 0) throw DomainError("KernelTable: s lies left of the first gamma pole");
    residue0_ = gamma_factor(P, s) * g(0.0);
    right_ = make_contour(2.0);
    has_left_ = true;
    left_ = make_contour(-edge / 2);

    u0_ = std::log(y_min);
    double u1 = std::log(y_max);
    std::size_t n = static_cast<std::size_t>(std::ceil((u1 - u0_) / log_step)) + 1;
    du_ = n > 1 ? (u1 - u0_) / static_cast<double>(n - 1) : 1.0;
    val_.resize(n);
    der_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = std::exp(u0_ + du_ * static_cast<double>(i));
        cplx d;
        val_[i] = direct(y, &d);
        der_[i] = d * y;
    }
}

KernelTable::Contour KernelTable::make_contour(double c) const {
    double dist = std::abs(c);
    double edge = s_.real() + min_shift(P_.shifts);
    for (int k = 0; k < 4; ++k) dist = std::min(dist, std::abs(c + edge + 2 * k));
    double h = std::min(h_, dist / 6);
    auto weight = [&](double t) {
        cplx z(c, t);
        return std::exp(log_gamma_factor(P_.shifts, s_ + z)) * g_(z) / z * (h / (2 * kPi));
    };
    Contour C;
    C.c = c;
    cplx w0 = weight(0);
    double ref = std::abs(w0);
    const int cap = 400000;
    std::vector<std::pair<double, cplx>> pos, neg;
    for (int sign : {1, -1}) {
        auto& out = sign > 0 ? pos : neg;
        for (int k = 1;; ++k) {
            if (k > cap) throw NumericError("contour weights do not decay; smoothing parameters non-convergent");
            double t = sign * k * h;
            cplx w = weight(t);
            out.push_back({t, w});
            if (std::abs(w) < tol_ * ref) break;
        }
    }
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) {
        C.t.push_back(it->first);
        C.weight.push_back(it->second);
    }
    C.t.push_back(0);
    C.weight.push_back(w0);
    for (auto& [t, w] : pos) {
        C.t.push_back(t);
        C.weight.push_back(w);
    }
    return C;
}

cplx KernelTable::eval(const Contour& C, double u, cplx* deriv) const {
    cplx acc = 0.0, dacc = 0.0;
    for (std::size_t k = 0; k < C.t.size(); ++k) {
        cplx e = C.weight[k] * std::polar(1.0, -C.t[k] * u);
        acc += e;
        if (deriv) dacc -= e * cplx(C.c, C.t[k]);
    }
    double scale = std::exp(-C.c * u);
    if (deriv) *deriv = dacc * scale;
    return acc * scale;
}

cplx KernelTable::direct(double y, cplx* dHdy) const {
    double u = std::log(y);
    cplx du;
    cplx v = (y < 1 && has_left_) ? residue0_ + eval(left_, u, &du) : eval(right_, u, &du);
    if (dHdy) *dHdy = du / y;
    return v;
}

cplx KernelTable::H(double y) const {
    double u = std::log(y);
    double t = (u - u0_) / du_;
    if (t < 0 || t > static_cast<double>(val_.size() - 1)) return direct(y);
    std::size_t j = std::min(static_cast<std::size_t>(t), val_.size() - 2);
    double f = t - static_cast<double>(j);
    double h00 = (1 + 2 * f) * (1 - f) * (1 - f), h10 = f * (1 - f) * (1 - f);
    double h01 = f * f * (3 - 2 * f), h11 = f * f * (f - 1);
    return h00 * val_[j] + h10 * du_ * der_[j] + h01 * val_[j + 1] + h11 * du_ * der_[j + 1];
}

namespace {

// Sum_{n <= N} a(n) (n/Q)^{-s} H_s(n/Q).
cplx afe_side(const CompletedLParams& P, const CoeffFn& a, cplx s, u64 N, const AfeOptions& opt, bool conj_coeff,
              double* tail) {
    double Q = std::sqrt(P.conductor);
    double ylo = 1.0 / Q, yhi = static_cast<double>(N + 1) / Q;
    KernelTable K(P, s, opt.smoothing, ylo * 0.999, yhi * 1.001, opt.quad_step, opt.quad_rel_tol, opt.log_grid_step);
    const bool use_table = N > 2000;
    CplxSum acc;
    for (u64 n = 1; n <= N; ++n) {
        cplx c = a(n);
        if (conj_coeff) c = std::conj(c);
        if (c == 0.0) continue;
        double y = static_cast<double>(n) / Q;
        cplx h = use_table ? K.H(y) : K.direct(y);
        acc += c * std::pow(y, -s) * h;
    }
    *tail = std::abs(K.direct(yhi)) / std::max(std::abs(K.gamma_at_s()), 1e-300);
    return acc.value();
}

}  // namespace

CentralValue lvalue(const CompletedLParams& P, const CoeffFn& a, cplx s, const AfeOptions& opt) {
    double Q = std::sqrt(P.conductor);
    double ymax = (opt.y_max > 0 ? opt.y_max : (P.degree == 1 ? 6.0 : 11.0)) * opt.cutoff_scale;
    u64 N = static_cast<u64>(std::floor(ymax * Q));
    if (N < 1) N = 1;
    double t1 = 0, t2 = 0;
    cplx lam = afe_side(P, a, s, N, opt, false, &t1);
    lam += P.root_number * afe_side(P, a, 1.0 - s, N, opt, true, &t2);
    for (const auto& pole : P.poles) {
        cplx z = pole.rho - s;
        if (std::abs(z) < 1e-12) throw DomainError("lvalue: evaluation point is a pole");
        lam -= pole.residue * opt.smoothing(z) / z;
    }
    if (std::max(t1, t2) > 1e-8)
        throw NumericError("approximate functional equation not converged at y_max = " + std::to_string(ymax) +
                           " (kernel tail " + fmt_sci(std::max(t1, t2)) + ")");
    CentralValue out;
    out.Lambda = lam;
    out.L = lam / (std::pow(Q, s) * gamma_factor(P, s));
    out.terms = N;
    out.y_max = ymax;
    return out;
}

FeCheck fe_self_check(const CompletedLParams& P, const CoeffFn& a, cplx w, const AfeOptions& opt) {
    AfeOptions o1 = opt;
    o1.smoothing = Smoothing{Smoothing::Unit, 0};
    AfeOptions o2 = opt;
    o2.smoothing = Smoothing{Smoothing::Gaussian, opt.smoothing.kind == Smoothing::Gaussian ? opt.smoothing.lambda : 8.0 * P.degree * P.degree};
    o2.cutoff_scale = 3 * opt.cutoff_scale;  // the Gaussian weight widens the kernel
    CompletedLParams dual = P;
    dual.root_number = std::conj(P.root_number);
    for (auto& p : dual.poles) {
        p.rho = std::conj(p.rho);
        p.residue = std::conj(p.residue);
    }
    CoeffFn abar = [&](u64 n) { return std::conj(a(n)); };
    cplx Lw = lvalue(P, a, w, o1).L;
    cplx Lbar = lvalue(dual, abar, 1.0 - w, o2).L;
    FeCheck r;
    r.lhs = gamma_factor(P, w) * Lw;
    r.rhs = P.root_number * std::pow(P.conductor, 0.5 - w) * gamma_factor(P, 1.0 - w) * Lbar;
    r.residual = std::abs(r.lhs - r.rhs);
    return r;
}

CentralValueBatch::CentralValueBatch(const CoefficientSystem& sys, u64 n_max, double y_max)
    : y_max_(y_max), sqrt_cond_(std::sqrt(static_cast<double>(sys.conductor))), shifts_(sys.shifts) {
    if (std::abs(sys.root_number - 1.0) > 1e-12) throw ConfigError("CentralValueBatch expects root number +1");
    b_ = sys.real_coefficient_table(n_max);
    for (u64 n = 1; n <= n_max; ++n) b_[n] /= std::sqrt(static_cast<double>(n));
    CompletedLParams P;
    P.shifts = shifts_;
    P.degree = static_cast<int>(shifts_.size());
    y_split_ = 0.02;
    dy_ = 1e-3;
    kernel_ = std::make_shared<KernelTable>(P, 0.5, Smoothing{}, 1e-9, y_split_ * 1.01, 0.05, 1e-18, 0.01);
    gamma_half_ = kernel_->gamma_at_s().real();
    std::size_t n = static_cast<std::size_t>(std::ceil((y_max_ - y_split_) / dy_)) + 2;
    std::vector<double> v(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx dd;
        v[i] = kernel_->direct(y_split_ + dy_ * static_cast<double>(i), &dd).real();
        d[i] = dd.real() * dy_;
    }
    // cubic coefficients per cell in the local coordinate f in [0, 1)
    hv_.resize(4 * (n - 1));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double p0 = v[i], p1 = v[i + 1], m0 = d[i], m1 = d[i + 1];
        hv_[4 * i] = p0;
        hv_[4 * i + 1] = m0;
        hv_[4 * i + 2] = 3 * (p1 - p0) - 2 * m0 - m1;
        hv_[4 * i + 3] = 2 * (p0 - p1) + m0 + m1;
    }
}

u64 CentralValueBatch::terms_for(i64 d) const {
    double Q = std::pow(static_cast<double>(d), 1.5) * sqrt_cond_;
    return static_cast<u64>(std::floor(y_max_ * Q));
}

double CentralValueBatch::central(i64 d) const {
    if (d <= 0) throw DomainError("CentralValueBatch: positive discriminant required");
    double Q = std::pow(static_cast<double>(d), 1.5) * sqrt_cond_;
    u64 N = terms_for(d);
    if (N > n_max()) throw DomainError("CentralValueBatch: needs " + std::to_string(N) + " coefficients, have " + std::to_string(n_max()));
    std::vector<signed char> chi(static_cast<std::size_t>(d));
    for (i64 r = 0; r < d; ++r) chi[r] = static_cast<signed char>(kronecker(d, static_cast<u64>(r)));
    u64 n_split = static_cast<u64>(std::floor(y_split_ * Q));
    CompSum<double> total;
    double block = 0;
    std::size_t idx = 0;
    std::size_t cells = hv_.size() / 4;
    const double inv = 1.0 / (Q * dy_), off = y_split_ / dy_;
    for (u64 n = 1; n <= N; ++n) {
        if (++idx == static_cast<std::size_t>(d)) idx = 0;
        int c = chi[idx];
        if (c != 0) {
            double h;
            if (n <= n_split) {
                h = kernel_->H(static_cast<double>(n) / Q).real();
            } else {
                double t = static_cast<double>(n) * inv - off;
                std::size_t j = std::min(static_cast<std::size_t>(t), cells - 1);
                double f = t - static_cast<double>(j);
                const double* cc = &hv_[4 * j];
                h = cc[0] + f * (cc[1] + f * (cc[2] + f * cc[3]));
            }
            block += c * b_[n] * h;
        }
        if ((n & 0xffff) == 0) {
            total += block;
            block = 0;
        }
    }
    total += block;
    return 2 * total.value() / gamma_half_;
}

cplx remove_two_factor(const CoefficientSystem& sys, int chi2, cplx s, cplx value) {
    if (chi2 == 0) return value;
    cplx x = static_cast<double>(chi2) * std::pow(2.0, -s);
    for (const auto& g : sys.satake(2)) value *= 1.0 - g * x;
    return value;
}

}  // namespace ddslab::lseries
