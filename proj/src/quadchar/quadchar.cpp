#include "ddslab/quadchar.hpp"

#include <map>
#include <numeric>
#include <sstream>

namespace ddslab::quadchar {

namespace {

Rational reduce(i64 n, i64 d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i64 g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
}

void require_prime_to_S(const IdealRec& D, const SymbolContext& ctx, const char* what) {
    for (auto& [P, e] : D.factors)
        if (ringarith::in_set(ctx.S, P.p))
            throw DomainError(std::string(what) + " " + D.str() + " is not prime to S");
}

}  // namespace

int RayClass::index() const {
    int idx = 0;
    for (std::size_t i = 0; i < e.size(); ++i) idx |= (e[i] & 1) << i;
    return idx;
}

RayClass RayClass::from_index(int idx, int k) {
    RayClass c;
    for (int i = 0; i < k; ++i) c.e.push_back((idx >> i) & 1);
    return c;
}

RayClass RayClass::operator*(const RayClass& o) const {
    RayClass c;
    for (std::size_t i = 0; i < e.size(); ++i) c.e.push_back(e[i] ^ o.e[i]);
    return c;
}

std::string RayClass::str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
    return s + "]";
}

int ClassCharacter::operator()(const RayClass& c) const {
    int v = 1;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (c.e[i]) v *= values[i];
    return v;
}

bool ClassCharacter::trivial() const {
    for (int v : values)
        if (v != 1) return false;
    return true;
}

std::string ClassCharacter::str() const {
    std::string s = "rho(";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::string(values[i] > 0 ? "+" : "-");
    return s + ")";
}

RayClass SymbolContext::class_of(u64 n) const {
    if (n % 2 == 0) throw DomainError("class_of: " + std::to_string(n) + " is not prime to S");
    switch (n % 8) {
        case 1: return RayClass{{0, 0}};
        case 3: return RayClass{{1, 0}};
        case 5: return RayClass{{0, 1}};
        default: return RayClass{{1, 1}};
    }
}

RayClass SymbolContext::class_of(const IdealRec& D) const {
    require_prime_to_S(D, *this, "ideal");
    return class_of(D.as_integer());
}

std::vector<ClassCharacter> SymbolContext::characters() const {
    std::vector<ClassCharacter> out;
    for (int idx = 0; idx < h_C; ++idx) {
        ClassCharacter rho;
        for (int i = 0; i < k(); ++i) rho.values.push_back(((idx >> i) & 1) ? -1 : 1);
        out.push_back(rho);
    }
    return out;
}

int chi_int(u64 D, u64 N) {
    if (D % 2 == 0 || N % 2 == 0) throw DomainError("chi: arguments must be prime to S");
    auto [D0, D1] = ringarith::squarefree_split_u64(D);
    return jacobi(static_cast<i64>(D0), N);
}

SymbolContext build_context(const BaseField& F) {
    if (!F.is_rational())
        throw ConfigError("symbol context for " + F.name() +
                          ": certificate-based construction over quadratic fields is not implemented");
    SymbolContext ctx;
    ctx.field = F;
    ctx.places = {"inf", "2"};
    ctx.S = {2};
    ctx.C = 8;
    ctx.generators = {3, 5};
    ctx.representatives = {1, 3, 5, 15};
    ctx.h_C = 4;

    // Class witnesses: odd primes in each residue class mod 8.
    std::map<int, std::vector<u64>> wit;
    for (u64 p : primes_up_to(2000)) {
        if (p == 2) continue;
        auto& v = wit[ctx.class_of(p).index()];
        if (v.size() < 24) v.push_back(p);
    }
    ctx.eta.assign(4, std::vector<int>(4, 0));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            int val = 0, checked = 0;
            for (u64 p : wit[i]) {
                for (u64 q : wit[j]) {
                    if (p == q) continue;
                    int v = chi_int(p, q) * chi_int(q, p);
                    if (val == 0) val = v;
                    if (v != val) throw StructuralError("eta witnesses disagree; symbol implementation error");
                    if (++checked == 20) break;
                }
                if (checked == 20) break;
            }
            ctx.eta[i][j] = val;
        }
    }
    return ctx;
}

Decomposition decompose(const IdealRec& D, const SymbolContext& ctx) {
    require_prime_to_S(D, ctx, "D");
    auto sf = ringarith::squarefree_split(D);
    u64 D0 = sf.D0.as_integer();
    RayClass c = ctx.class_of(D0);
    u64 mE = ctx.representatives[c.index()];
    Decomposition out;
    out.E = c;
    out.m_E = mE;
    out.m = reduce(static_cast<i64>(D0), static_cast<i64>(mE));
    out.G = sf.D1;
    return out;
}

int chi(const IdealRec& D, const IdealRec& N, const SymbolContext& ctx) {
    require_prime_to_S(D, ctx, "D");
    require_prime_to_S(N, ctx, "N");
    Decomposition dec = decompose(D, ctx);
    // (m m_E / N) with m m_E = D0.
    i64 top = dec.m.num * static_cast<i64>(dec.m_E) / dec.m.den;
    return jacobi(top, N.as_integer());
}

int eta(const RayClass& c1, const RayClass& c2, const SymbolContext& ctx) {
    return ctx.eta[c1.index()][c2.index()];
}

std::vector<SieveTerm> sieve_delta(const RayClass& E, const SymbolContext& ctx) {
    std::vector<SieveTerm> out;
    for (auto& rho : ctx.characters()) out.push_back({rho, reduce(rho(E), ctx.h_C)});
    return out;
}

Rational apply_sieve(const std::vector<SieveTerm>& terms, const RayClass& D) {
    i64 num = 0, den = 1;
    for (auto& t : terms) {
        i64 n = t.coeff.num * t.rho(D);
        num = num * t.coeff.den + n * den;
        den *= t.coeff.den;
        Rational r = reduce(num, den);
        num = r.num;
        den = r.den;
    }
    return reduce(num, den);
}

std::string SymbolContext::to_text() const {
    std::ostringstream os;
    os << "format = ddslab-symbol-context\n";
    os << "version = 1\n";
    os << "field = " << field.name() << "\n";
    os << "places = ";
    for (std::size_t i = 0; i < places.size(); ++i) os << (i ? "," : "") << places[i];
    os << "\nmodulus = " << C << "\n";
    os << "h_C = " << h_C << "\n";
    os << "generators = ";
    for (std::size_t i = 0; i < generators.size(); ++i) os << (i ? "," : "") << generators[i];
    os << "\nrepresentatives = ";
    for (std::size_t i = 0; i < representatives.size(); ++i) os << (i ? "," : "") << representatives[i];
    os << "\n";
    for (int i = 0; i < h_C; ++i)
        for (int j = 0; j < h_C; ++j) os << "eta." << i << "." << j << " = " << eta[i][j] << "\n";
    return os.str();
}

SymbolContext SymbolContext::from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("symbol context: malformed line '" + line + "'");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    if (kv["format"] != "ddslab-symbol-context") throw ConfigError("symbol context: bad format tag");
    if (kv["version"] != "1") throw ConfigError("symbol context: unsupported version " + kv["version"]);
    if (kv["field"] != "Q") throw ConfigError("symbol context: unsupported field " + kv["field"]);
    SymbolContext ctx = build_context(BaseField::rational());
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string t;
        while (std::getline(ss, t, ',')) out.push_back(t);
        return out;
    };
    try {
        ctx.places = split(kv.at("places"));
        ctx.C = std::stoull(kv.at("modulus"));
        ctx.h_C = std::stoi(kv.at("h_C"));
        ctx.generators.clear();
        for (auto& g : split(kv.at("generators"))) ctx.generators.push_back(std::stoull(g));
        ctx.representatives.clear();
        for (auto& g : split(kv.at("representatives"))) ctx.representatives.push_back(std::stoull(g));
        for (int i = 0; i < ctx.h_C; ++i)
            for (int j = 0; j < ctx.h_C; ++j)
                ctx.eta[i][j] = std::stoi(kv.at("eta." + std::to_string(i) + "." + std::to_string(j)));
    } catch (const std::out_of_range&) {
        throw ConfigError("symbol context: missing key");
    } catch (const std::invalid_argument&) {
        throw ConfigError("symbol context: malformed value");
    }
    if (ctx.C != 8 || ctx.h_C != 4) throw ConfigError("symbol context: inconsistent modulus data");
    return ctx;
}

}  // namespace ddslab::quadchar
