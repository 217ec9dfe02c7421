#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddslab/xcli.hpp"

namespace ddslab::xcli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    return x;
}

u64 to_u64(const std::string& key, const std::string& v) {
    u64 x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec == std::errc() && p == v.data() + v.size()) return x;
    // accept integral floating forms such as 1e4
    double d = to_double(key, v);
    if (d < 0 || d != std::floor(d) || d > 1.8e19) throw ConfigError("bad integer for " + key + ": '" + v + "'");
    return static_cast<u64>(d);
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(conv(key, item));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>)
            s += format_double(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "field") field = v;
    else if (key == "system") system = v;
    else if (key == "coeff_cache") coeff_cache = v;
    else if (key == "seed") seed = to_u64(key, v);
    else if (key == "S") S = to_list<u64>(key, v, to_u64);
    else if (key == "precision_bits") precision_bits = static_cast<int>(to_u64(key, v));
    else if (key == "s_set") s_set = to_list<double>(key, v, to_double);
    else if (key == "x_ladder") x_ladder = to_list<double>(key, v, to_double);
    else if (key == "Y_ladder") Y_ladder = to_list<u64>(key, v, to_u64);
    else if (key == "X_ladder") X_ladder = to_list<u64>(key, v, to_u64);
    else if (key == "r_min") r_min = to_u64(key, v);
    else if (key == "r_max") r_max = to_u64(key, v);
    else if (key == "r0") r0 = to_u64(key, v);
    else if (key == "delta") delta = to_double(key, v);
    else if (key == "class") cls = v == "all" ? -1 : static_cast<int>(to_u64(key, v));
    else if (key == "y_max") y_max = to_double(key, v);
    else if (key == "d_trunc") d_trunc = to_double(key, v);
    else if (key == "budget_seconds") budget_seconds = to_double(key, v);
    else if (key == "workers") workers = static_cast<unsigned>(to_u64(key, v));
    else if (key == "output") output = v;
    else if (key == "format") format = v;
    else if (key.rfind("tol.", 0) == 0 && key.size() > 4) tol[key.substr(4)] = to_double(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "field = " << field << "\n";
    os << "system = " << system << "\n";
    os << "coeff_cache = " << coeff_cache << "\n";
    os << "seed = " << seed << "\n";
    os << "S = " << join(S) << "\n";
    os << "precision_bits = " << precision_bits << "\n";
    os << "s_set = " << join(s_set) << "\n";
    os << "x_ladder = " << join(x_ladder) << "\n";
    os << "Y_ladder = " << join(Y_ladder) << "\n";
    os << "X_ladder = " << join(X_ladder) << "\n";
    os << "r_min = " << r_min << "\n";
    os << "r_max = " << r_max << "\n";
    os << "r0 = " << r0 << "\n";
    os << "delta = " << format_double(delta) << "\n";
    os << "class = " << (cls < 0 ? std::string("all") : std::to_string(cls)) << "\n";
    os << "y_max = " << format_double(y_max) << "\n";
    os << "d_trunc = " << format_double(d_trunc) << "\n";
    os << "budget_seconds = " << format_double(budget_seconds) << "\n";
    os << "workers = " << workers << "\n";
    os << "output = " << output << "\n";
    os << "format = " << format << "\n";
    for (const auto& [k, v] : tol) os << "tol." << k << " = " << format_double(v) << "\n";
    return os.str();
}

void ExperimentConfig::validate() const {
    if (field != "Q") throw ConfigError("field '" + field + "' unsupported; the numerics run over Q only");
    if (system != "sym2_delta" && system != "synthetic") throw ConfigError("unknown system '" + system + "'");
    if (precision_bits != 53) throw ConfigError("precision_bits = " + std::to_string(precision_bits) + " unsupported; only 53");
    if (S != std::vector<u64>{2}) throw ConfigError("S overrides are unsupported over Q; S = {2}");
    if (workers == 0) throw ConfigError("workers must be positive");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (cls < -1 || cls > 3) throw ConfigError("class must be all or 0..3");
    if (!(y_max > 0) || !(d_trunc > 0) || !(budget_seconds > 0)) throw ConfigError("y_max, d_trunc, budget_seconds must be positive");
    if (r_min < 3 || r_max < r_min) throw ConfigError("need 3 <= r_min <= r_max");
    for (double x : x_ladder)
        if (!(x > 0)) throw ConfigError("x_ladder entries must be positive");
    for (u64 y : Y_ladder)
        if (y == 0) throw ConfigError("Y_ladder entries must be positive");
    if (!coeff_cache.empty()) {
        auto sys = lseries::read_cache(coeff_cache);  // magic, version and field checks
        sys.validate();
    }
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
    auto it = tol.find(name);
    return it == tol.end() ? fallback : it->second;
}

}  // namespace ddslab::xcli
