#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "ddslab/lseries.hpp"

namespace ddslab::lseries {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'S', 'L', 'C', 'O', 'E', 'F'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<u64>(x)); }

void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

u64 get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("cache: truncated file");
    u64 v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("cache: truncated file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

std::string get_str(std::istream& is) {
    auto n = get_u32(is);
    if (n > (1u << 20)) throw IoError("cache: corrupt string length");
    std::string s(n, '\0');
    if (!is.read(s.data(), n)) throw IoError("cache: truncated file");
    return s;
}

}  // namespace

void write_cache(const std::string& path, const CoefficientSystem& sys) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot write " + tmp);
        os.write(kMagic, 8);
        put_u32(os, kVersion);
        put_str(os, "Q");
        put_str(os, sys.label);
        put_u64(os, sys.primes().size());
        for (std::size_t i = 0; i < sys.primes().size(); ++i) {
            put_u64(os, sys.primes()[i]);
            for (const auto& g : sys.satake_table()[i]) {
                put_f64(os, g.real());
                put_f64(os, g.imag());
            }
        }
        if (!os) throw IoError("write failed: " + tmp);
    }
    // readers see either the old or the new file
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot publish " + path);
}

CoefficientSystem read_cache(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a coefficient cache: " + path);
    auto version = get_u32(is);
    if (version != kVersion) throw IoError("unsupported cache version " + std::to_string(version));
    CacheHeader h;
    h.field = get_str(is);
    h.label = get_str(is);
    h.count = get_u64(is);
    if (h.field != "Q") throw IoError("cache field " + h.field + " unsupported");
    std::vector<std::uint32_t> primes;
    std::vector<Satake> sat;
    primes.reserve(h.count);
    sat.reserve(h.count);
    for (u64 i = 0; i < h.count; ++i) {
        primes.push_back(static_cast<std::uint32_t>(get_u64(is)));
        Satake g;
        for (auto& x : g) {
            double re = get_f64(is);
            double im = get_f64(is);
            x = {re, im};
        }
        sat.push_back(g);
    }
    return CoefficientSystem(h.label, std::move(primes), std::move(sat));
}

std::string cache_dir() {
    if (const char* d = std::getenv("DDSLAB_CACHE_DIR"); d && *d) return d;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::string(x) + "/ddslab";
    if (const char* home = std::getenv("HOME"); home && *home) return std::string(home) + "/.cache/ddslab";
    return ".ddslab-cache";
}

}  // namespace ddslab::lseries
