#include "ddslab/ringarith.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddslab::ringarith {

namespace {

const i64 kImagH1[] = {-1, -2, -3, -7, -11, -19, -43, -67, -163};
const i64 kRealH1[] = {2,  3,  5,  6,  7,  11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41,
                       43, 46, 47, 53, 57, 59, 61, 62, 67, 69, 71, 73, 77, 83, 86, 89, 93, 94, 97};

bool squarefree_i64(i64 d) {
    u64 a = static_cast<u64>(d < 0 ? -d : d);
    for (u64 p = 2; p * p <= a; ++p)
        if (a % (p * p) == 0) return false;
    return true;
}

u64 sqrt_mod(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
    auto mul = [p](u64 x, u64 y) { return static_cast<u64>(static_cast<unsigned __int128>(x) * y % p); };
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) {
            tt = mul(tt, tt);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mul(b, b);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    return std::min(r, p - r);
}

}  // namespace

const char* splitting_name(Splitting s) {
    switch (s) {
        case Splitting::Split: return "split";
        case Splitting::Ramified: return "ramified";
        case Splitting::Inert: return "inert";
    }
    return "?";
}

BaseField BaseField::rational() { return {}; }

BaseField BaseField::quadratic(i64 d, std::vector<u64> certificate) {
    if (d == 0 || d == 1 || !squarefree_i64(d))
        throw ConfigError("quadratic field parameter must be squarefree and != 0, 1");
    BaseField F;
    F.kind = FieldKind::Quadratic;
    F.d = d;
    i64 m4 = ((d % 4) + 4) % 4;
    F.discriminant = m4 == 1 ? d : 4 * d;
    bool known = std::find(std::begin(kImagH1), std::end(kImagH1), d) != std::end(kImagH1) ||
                 std::find(std::begin(kRealH1), std::end(kRealH1), d) != std::end(kRealH1);
    if (!known && certificate.empty())
        throw ConfigError("quadratic field Q(sqrt " + std::to_string(d) +
                          ") needs an S-set certificate (class number not known to be one)");
    F.certificate = std::move(certificate);
    F.zeta_residue = quadratic_L1(F.discriminant);
    F.class_number_over_S = 1;
    return F;
}

std::string BaseField::name() const {
    if (is_rational()) return "Q";
    return "Q(sqrt " + std::to_string(d) + ")";
}

Splitting BaseField::splitting_of(u64 p) const {
    if (is_rational()) return Splitting::Split;
    int k = kronecker(discriminant, p);
    if (k == 0) return Splitting::Ramified;
    return k == 1 ? Splitting::Split : Splitting::Inert;
}

bool PrimeIdealRec::operator<(const PrimeIdealRec& o) const {
    if (norm != o.norm) return norm < o.norm;
    if (p != o.p) return p < o.p;
    if (tag != o.tag) return static_cast<int>(tag) < static_cast<int>(o.tag);
    return gen < o.gen;
}

std::string PrimeIdealRec::str() const {
    std::ostringstream os;
    os << "P(" << p;
    if (tag == Splitting::Split && gen) os << "," << gen;
    if (norm != p) os << ",inert";
    if (tag == Splitting::Ramified) os << ",ram";
    os << ")";
    return os.str();
}

IdealRec IdealRec::rational(u64 n) {
    if (n == 0) throw DomainError("zero ideal");
    IdealRec r;
    for (auto [p, e] : factor_trial(n)) r.factors.push_back({PrimeIdealRec{p, p, Splitting::Split, 0}, e});
    r.norm = n;
    return r;
}

IdealRec IdealRec::from_factors(std::vector<std::pair<PrimeIdealRec, int>> f) {
    std::sort(f.begin(), f.end(), [](auto& a, auto& b) { return a.first < b.first; });
    IdealRec r;
    for (auto& [P, e] : f) {
        if (e <= 0) continue;
        if (!r.factors.empty() && r.factors.back().first == P)
            r.factors.back().second += e;
        else
            r.factors.push_back({P, e});
    }
    for (auto& [P, e] : r.factors) r.norm = checked_mul(r.norm, ipow(P.norm, e));
    return r;
}

bool IdealRec::squarefree() const {
    return std::all_of(factors.begin(), factors.end(), [](auto& f) { return f.second == 1; });
}

int IdealRec::exponent(const PrimeIdealRec& P) const {
    for (auto& [Q, e] : factors)
        if (Q == P) return e;
    return 0;
}

bool IdealRec::divides(const IdealRec& o) const {
    for (auto& [P, e] : factors)
        if (o.exponent(P) < e) return false;
    return true;
}

u64 IdealRec::as_integer() const {
    u64 n = 1;
    for (auto& [P, e] : factors) {
        if (P.norm != P.p || P.tag != Splitting::Split || P.gen != 0)
            throw DomainError("ideal is not an ideal of Z");
        n = checked_mul(n, ipow(P.p, e));
    }
    return n;
}

IdealRec IdealRec::operator*(const IdealRec& o) const {
    auto f = factors;
    f.insert(f.end(), o.factors.begin(), o.factors.end());
    return from_factors(std::move(f));
}

bool IdealRec::operator<(const IdealRec& o) const {
    if (norm != o.norm) return norm < o.norm;
    return factors < o.factors;
}

std::string IdealRec::str() const {
    if (factors.empty()) return "(1)";
    std::ostringstream os;
    bool first = true;
    for (auto& [P, e] : factors) {
        if (!first) os << "*";
        first = false;
        os << P.str();
        if (e > 1) os << "^" << e;
    }
    return os.str();
}

bool in_set(const PrimeSet& S, u64 p) { return std::find(S.begin(), S.end(), p) != S.end(); }

std::vector<PrimeIdealRec> primes_over(const BaseField& F, u64 p) {
    if (F.is_rational()) return {PrimeIdealRec{p, p, Splitting::Split, 0}};
    switch (F.splitting_of(p)) {
        case Splitting::Ramified: return {PrimeIdealRec{p, p, Splitting::Ramified, 0}};
        case Splitting::Inert: return {PrimeIdealRec{p * p, p, Splitting::Inert, 0}};
        case Splitting::Split: {
            u64 r;
            if (p == 2) {
                r = 0;
            } else {
                i64 dm = F.d % static_cast<i64>(p);
                if (dm < 0) dm += static_cast<i64>(p);
                r = sqrt_mod(static_cast<u64>(dm), p);
            }
            u64 r2 = p == 2 ? 1 : p - r;
            return {PrimeIdealRec{p, p, Splitting::Split, r}, PrimeIdealRec{p, p, Splitting::Split, r2}};
        }
    }
    return {};
}

std::vector<IdealRec> enumerate_ideals(const BaseField& F, const PrimeSet& S, u64 X) {
    if (X < 1) throw DomainError("enumerate_ideals: X must be >= 1");
    std::vector<IdealRec> out;
    if (F.is_rational()) {
        Sieve sv(X);
        for (u64 n = 1; n <= X; ++n) {
            IdealRec r;
            bool ok = true;
            for (auto [p, e] : sv.factor(n)) {
                if (in_set(S, p)) {
                    ok = false;
                    break;
                }
                r.factors.push_back({PrimeIdealRec{p, p, Splitting::Split, 0}, e});
            }
            if (!ok) continue;
            r.norm = n;
            out.push_back(std::move(r));
        }
        return out;
    }
    std::vector<PrimeIdealRec> primes;
    for (u64 p : primes_up_to(X)) {
        if (in_set(S, p)) continue;
        for (auto& P : primes_over(F, p))
            if (P.norm <= X) primes.push_back(P);
    }
    std::sort(primes.begin(), primes.end());
    std::vector<std::pair<PrimeIdealRec, int>> cur;
    auto rec = [&](auto&& self, std::size_t start, u64 norm) -> void {
        IdealRec r;
        r.factors = cur;
        r.norm = norm;
        out.push_back(r);
        for (std::size_t i = start; i < primes.size(); ++i) {
            const auto& P = primes[i];
            if (norm > X / P.norm) break;
            u64 nn = norm * P.norm;
            int e = 1;
            while (true) {
                cur.push_back({P, e});
                self(self, i + 1, nn);
                cur.pop_back();
                if (nn > X / P.norm) break;
                nn *= P.norm;
                ++e;
            }
        }
    };
    rec(rec, 0, 1);
    std::sort(out.begin(), out.end());
    return out;
}

SFDecomposition squarefree_split(const IdealRec& D) {
    std::vector<std::pair<PrimeIdealRec, int>> f0, f1;
    for (auto& [P, e] : D.factors) {
        if (e % 2) f0.push_back({P, 1});
        if (e / 2) f1.push_back({P, e / 2});
    }
    return {IdealRec::from_factors(f0), IdealRec::from_factors(f1)};
}

IdealRec recompose(const SFDecomposition& s) { return s.D0 * s.D1 * s.D1; }

int moebius(const IdealRec& D) {
    if (!D.squarefree()) return 0;
    return D.factors.size() % 2 ? -1 : 1;
}

int moebius_u64(u64 n) {
    int m = 1;
    for (auto [p, e] : factor_trial(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

std::pair<u64, u64> squarefree_split_u64(u64 n) {
    u64 n0 = 1, n1 = 1;
    for (auto [p, e] : factor_trial(n)) {
        if (e % 2) n0 *= p;
        n1 *= ipow(p, e / 2);
    }
    return {n0, n1};
}

cplx zeta_partial(const BaseField& F, cplx w, const PrimeSet& S, u64 X) {
    if (w.real() <= 1.0) throw DomainError("zeta_partial: Re(w) must exceed 1");
    cplx prod = 1.0;
    if (X < 2) return prod;
    for (u64 p : primes_up_to(X)) {
        if (in_set(S, p)) continue;
        for (auto& P : primes_over(F, p)) {
            if (P.norm > X) continue;
            prod /= (1.0 - std::pow(static_cast<double>(P.norm), -w));
        }
    }
    return prod;
}

bool is_fundamental_discriminant(i64 d) {
    if (d == 1) return true;
    if (d == 0) return false;
    i64 m4 = ((d % 4) + 4) % 4;
    if (m4 == 1) return squarefree_i64(d);
    if (m4 != 0) return false;
    i64 q = d / 4;
    i64 q4 = ((q % 4) + 4) % 4;
    return (q4 == 2 || q4 == 3) && squarefree_i64(q);
}

double quadratic_L1(i64 disc) {
    if (!is_fundamental_discriminant(disc) || disc == 1)
        throw DomainError("quadratic_L1: not a nontrivial fundamental discriminant");
    u64 k = static_cast<u64>(disc < 0 ? -disc : disc);
    CompSum<double> acc;
    if (disc > 0) {
        for (u64 a = 1; a < k; ++a) {
            int c = kronecker(disc, a);
            if (c) acc += c * std::log(2.0 * std::sin(kPi * static_cast<double>(a) / static_cast<double>(k)));
        }
        return -acc.value() / std::sqrt(static_cast<double>(k));
    }
    for (u64 a = 1; a < k; ++a) acc += kronecker(disc, a) * static_cast<double>(a);
    return -kPi * acc.value() / std::pow(static_cast<double>(k), 1.5);
}

}  // namespace ddslab::ringarith
