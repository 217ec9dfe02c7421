#include "ddslab/fegroup.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace ddslab::fegroup {

namespace {

Q abs_q(const Q& q) { return q < 0 ? Q(-q) : q; }

Q dot(const Q& a, const Q& b, const Vec2& v) { return a * v.x + b * v.y; }

struct VRep {
    bool whole = false;
    std::vector<Vec2> pts;
    std::vector<Vec2> rays;
};

void push_unique(std::vector<Vec2>& v, const Vec2& p) {
    if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
}

Vec2 ray_normalized(const Vec2& r) {
    Q k = abs_q(r.x) > abs_q(r.y) ? abs_q(r.x) : abs_q(r.y);
    return {r.x / k, r.y / k};
}

// V-representation of the closure of a piece.
VRep vrep(const Piece& piece) {
    VRep out;
    if (piece.hs.empty()) {
        out.whole = true;
        return out;
    }
    const auto& hs = piece.hs;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto& h = hs[i];
        Vec2 x0 = h.b != 0 ? Vec2{0, h.c / h.b} : Vec2{h.c / h.a, 0};
        Vec2 d{-h.b, h.a};
        std::optional<Q> lo, hi;
        bool feasible = true;
        for (std::size_t j = 0; j < hs.size() && feasible; ++j) {
            if (j == i) continue;
            const auto& g = hs[j];
            Q ad = dot(g.a, g.b, d);
            Q rhs = g.c - dot(g.a, g.b, x0);
            if (ad == 0) {
                if (rhs > 0) feasible = false;
            } else if (ad > 0) {
                Q t = rhs / ad;
                if (!lo || t > *lo) lo = t;
            } else {
                Q t = rhs / ad;
                if (!hi || t < *hi) hi = t;
            }
        }
        if (!feasible || (lo && hi && *lo > *hi)) continue;
        auto at = [&](const Q& t) { return Vec2{x0.x + t * d.x, x0.y + t * d.y}; };
        if (lo) push_unique(out.pts, at(*lo));
        if (hi) push_unique(out.pts, at(*hi));
        if (!lo && !hi) push_unique(out.pts, x0);
    }
    std::vector<Vec2> cand;
    for (const auto& h : hs) {
        cand.push_back({-h.b, h.a});
        cand.push_back({h.b, -h.a});
        cand.push_back({h.a, h.b});
    }
    for (const auto& r : cand) {
        bool ok = std::all_of(hs.begin(), hs.end(), [&](const HalfPlane& g) { return dot(g.a, g.b, r) >= 0; });
        if (ok) push_unique(out.rays, ray_normalized(r));
    }
    if (out.pts.empty()) throw StructuralError("region piece is empty");
    return out;
}

bool rays_span_plane(const std::vector<Vec2>& rays) {
    if (rays.empty()) return false;
    for (const auto& r : rays) {
        for (const Vec2& n : {Vec2{-r.y, r.x}, Vec2{r.y, -r.x}}) {
            bool ok = std::all_of(rays.begin(), rays.end(), [&](const Vec2& q) { return dot(n.x, n.y, q) >= 0; });
            if (ok) return false;
        }
    }
    return true;
}

// Facet half-planes n.x >= c of conv(pts) + cone(rays).
std::vector<HalfPlane> facets(const std::vector<Vec2>& pts, const std::vector<Vec2>& rays) {
    std::vector<Vec2> normals;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Vec2 e = pts[j] - pts[i];
            normals.push_back({-e.y, e.x});
            normals.push_back({e.y, -e.x});
        }
    for (const auto& r : rays) {
        normals.push_back({-r.y, r.x});
        normals.push_back({r.y, -r.x});
    }
    std::vector<HalfPlane> out;
    for (const auto& n : normals) {
        if (n.x == 0 && n.y == 0) continue;
        if (!std::all_of(rays.begin(), rays.end(), [&](const Vec2& r) { return dot(n.x, n.y, r) >= 0; })) continue;
        Q c = dot(n.x, n.y, pts[0]);
        for (const auto& p : pts) c = std::min(c, Q(dot(n.x, n.y, p)));
        int on = 0;
        for (const auto& p : pts)
            if (dot(n.x, n.y, p) == c) ++on;
        bool parallel_ray =
            std::any_of(rays.begin(), rays.end(), [&](const Vec2& r) { return dot(n.x, n.y, r) == 0; });
        if (on >= 2 || (on >= 1 && parallel_ray)) {
            HalfPlane h = HalfPlane{n.x, n.y, c, true}.normalized();
            if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Q parse_q(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) return Q(boost::multiprecision::cpp_int(s.substr(0, slash))) /
                                            Q(boost::multiprecision::cpp_int(s.substr(slash + 1)));
    auto dotp = s.find('.');
    if (dotp == std::string::npos) return Q(boost::multiprecision::cpp_int(s));
    std::string digits = s.substr(0, dotp) + s.substr(dotp + 1);
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = dotp + 1; i < s.size(); ++i) den *= 10;
    return Q(boost::multiprecision::cpp_int(digits)) / Q(den);
}

std::string qstr(const Q& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

AffineMap2 AffineMap2::compose(const AffineMap2& g) const {
    std::string n = name.empty() || g.name.empty() ? "" : (name == "id" ? g.name : g.name == "id" ? name : name + g.name);
    return {M * g.M, M * g.t + t, n};
}

AffineMap2 AffineMap2::inverse() const {
    Q det = M.det();
    if (det == 0) throw DomainError("affine map is not invertible");
    Mat2 inv{M.d / det, -M.b / det, -M.c / det, M.a / det};
    Vec2 ti = inv * t;
    return {inv, {-ti.x, -ti.y}, name.empty() ? "" : name + "^-1"};
}

bool AffineMap2::is_identity() const { return M == Mat2{1, 0, 0, 1} && t == Vec2{0, 0}; }

std::string AffineMap2::str() const {
    auto lin = [](const Q& cs, const Q& cw, const Q& c0) {
        std::string out;
        auto term = [&](const Q& k, const std::string& v) {
            if (k == 0) return;
            std::string mag = abs_q(k) == 1 && !v.empty() ? "" : qstr(abs_q(k));
            if (out.empty())
                out += (k < 0 ? "-" : "") + mag + v;
            else
                out += (k < 0 ? " - " : " + ") + mag + v;
        };
        term(cs, "s");
        term(cw, "w");
        term(c0, "");
        return out.empty() ? std::string("0") : out;
    };
    return "(s,w) -> (" + lin(M.a, M.b, t.x) + ", " + lin(M.c, M.d, t.y) + ")";
}

AffineMap2 identity_map() { return {{1, 0, 0, 1}, {0, 0}, "id"}; }

AffineMap2 phi() { return {{-1, 0, 3, 1}, {1, Q(-3) / 2}, "phi"}; }

AffineMap2 psi() { return {{1, 1, 0, -1}, {Q(-1) / 2, 1}, "psi"}; }

std::vector<AffineMap2> generate_group(const AffineMap2& g1, const AffineMap2& g2, int max_steps) {
    std::vector<AffineMap2> elems{identity_map()};
    std::size_t frontier = 0;
    int steps = 0;
    while (frontier < elems.size()) {
        AffineMap2 cur = elems[frontier++];
        for (const auto* g : {&g1, &g2}) {
            if (++steps > max_steps) throw StructuralError("group closure not reached within step budget");
            AffineMap2 nxt = g->compose(cur);
            if (std::find(elems.begin(), elems.end(), nxt) == elems.end()) elems.push_back(nxt);
        }
    }
    return elems;
}

std::string FixedSet::str() const {
    switch (kind) {
        case Empty: return "empty";
        case Plane: return "plane";
        case Point: return "point(" + qstr(point.x) + "," + qstr(point.y) + ")";
        case Line:
            return "line(" + qstr(point.x) + "," + qstr(point.y) + ")+t(" + qstr(dir.x) + "," + qstr(dir.y) + ")";
    }
    return "?";
}

FixedSet fixed_points(const AffineMap2& f) {
    // (M - I) x = -t
    Q a = f.M.a - 1, b = f.M.b, c = f.M.c, d = f.M.d - 1;
    Q r1 = -f.t.x, r2 = -f.t.y;
    FixedSet out;
    Q det = a * d - b * c;
    if (det != 0) {
        out.kind = FixedSet::Point;
        out.point = {(r1 * d - b * r2) / det, (a * r2 - c * r1) / det};
        return out;
    }
    if (a == 0 && b == 0 && c == 0 && d == 0) {
        out.kind = (r1 == 0 && r2 == 0) ? FixedSet::Plane : FixedSet::Empty;
        return out;
    }
    // rank one: pick a nonzero row and check the other is consistent
    Q ra = a, rb = b, rr = r1;
    if (a == 0 && b == 0) {
        ra = c;
        rb = d;
        rr = r2;
    }
    Vec2 x0 = rb != 0 ? Vec2{0, rr / rb} : Vec2{rr / ra, 0};
    if (a * x0.x + b * x0.y != r1 || c * x0.x + d * x0.y != r2) {
        out.kind = FixedSet::Empty;
        return out;
    }
    out.kind = FixedSet::Line;
    out.point = x0;
    out.dir = {-rb, ra};
    return out;
}

bool HalfPlane::contains(const Vec2& p) const {
    Q v = a * p.x + b * p.y;
    return strict ? v > c : v >= c;
}

bool HalfPlane::contains_closure(const Vec2& p) const { return a * p.x + b * p.y >= c; }

HalfPlane HalfPlane::normalized() const {
    Q k = a != 0 ? abs_q(a) : abs_q(b);
    if (k == 0) return *this;
    return {a / k, b / k, c / k, strict};
}

bool HalfPlane::operator<(const HalfPlane& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    if (c != o.c) return c < o.c;
    return strict < o.strict;
}

bool Piece::contains(const Vec2& p) const {
    return std::all_of(hs.begin(), hs.end(), [&](const HalfPlane& h) { return h.contains(p); });
}

bool Piece::contains_closure(const Vec2& p) const {
    return std::all_of(hs.begin(), hs.end(), [&](const HalfPlane& h) { return h.contains_closure(p); });
}

Piece Piece::canonical() const {
    std::vector<HalfPlane> n;
    for (const auto& h : hs) n.push_back(h.normalized());
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
    if (n.empty()) return {};
    VRep v = vrep(Piece{n});
    Piece out;
    for (const auto& h : n) {
        int on = 0;
        for (const auto& p : v.pts)
            if (h.a * p.x + h.b * p.y == h.c) ++on;
        bool par = std::any_of(v.rays.begin(), v.rays.end(),
                               [&](const Vec2& r) { return h.a * r.x + h.b * r.y == 0; });
        if (on >= 2 || (on >= 1 && par)) out.hs.push_back(h);
    }
    return out;
}

bool Region::contains(const Vec2& p) const {
    return std::any_of(pieces.begin(), pieces.end(), [&](const Piece& q) { return q.contains(p); });
}

bool Region::contains_closure(const Vec2& p) const {
    return std::any_of(pieces.begin(), pieces.end(), [&](const Piece& q) { return q.contains_closure(p); });
}

bool Region::is_whole_plane() const {
    return std::any_of(pieces.begin(), pieces.end(), [](const Piece& q) { return q.hs.empty(); });
}

Region Region::canonical() const {
    Region out;
    for (const auto& p : pieces) out.pieces.push_back(p.canonical());
    std::sort(out.pieces.begin(), out.pieces.end(), [](const Piece& x, const Piece& y) { return x.hs < y.hs; });
    return out;
}

bool Region::operator==(const Region& o) const {
    Region x = canonical(), y = o.canonical();
    if (x.pieces.size() != y.pieces.size()) return false;
    for (std::size_t i = 0; i < x.pieces.size(); ++i)
        if (x.pieces[i].hs != y.pieces[i].hs) return false;
    return true;
}

std::string Region::to_csv() const {
    std::ostringstream os;
    os << "piece,a,b,c,strict\n";
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (const auto& h : pieces[i].hs)
            os << i << "," << qstr(h.a) << "," << qstr(h.b) << "," << qstr(h.c) << "," << (h.strict ? 1 : 0) << "\n";
    return os.str();
}

Region region_R1() {
    // tau > 5/2 - 3 sigma, tau > 85/28 - 3 sigma/2, tau > 1
    Piece r11{{{3, 1, Q(5) / 2}, {Q(3) / 2, 1, Q(85) / 28}, {0, 1, 1}}};
    // sigma > 13/7 - tau, sigma + tau/2 > 13/7, sigma > 19/14
    Piece r12{{{1, 1, Q(13) / 7}, {1, Q(1) / 2, Q(13) / 7}, {1, 0, Q(19) / 14}}};
    return Region{{r11, r12}};
}

Region region_two_piece() {
    Piece a{{{1, 0, Q(1) / 2}, {0, 1, Q(119) / 124}}};
    Piece b{{{1, 0, 0, false}, {-1, 0, Q(-1) / 2, false}, {Q(191) / 62, 1, Q(5) / 2}}};
    return Region{{a, b}};
}

bool R1_case_member(int system, const Vec2& p, const Q& eps) {
    const Q& s = p.x;
    const Q& t = p.y;
    if (system == 1) {
        if (s <= Q(-5) / 14 - eps) return t > Q(5) / 2 - 3 * s;
        if (s < Q(19) / 14 + eps) return t > Q(85) / 28 - Q(3) / 2 * s;
        return t > 1;
    }
    if (system == 2) {
        if (t <= -eps) return s > Q(13) / 7 - t;
        if (t < 1 + eps) return s > Q(13) / 7 - t / 2;
        return s > Q(19) / 14;
    }
    throw DomainError("R1 case system must be 1 or 2");
}

Region transform_region(const AffineMap2& f, const Region& R) {
    AffineMap2 inv = f.inverse();
    Region out;
    for (const auto& piece : R.pieces) {
        Piece q;
        for (const auto& h : piece.hs) {
            // a . (Minv x' + tinv) > c
            Q na = h.a * inv.M.a + h.b * inv.M.c;
            Q nb = h.a * inv.M.b + h.b * inv.M.d;
            Q nc = h.c - (h.a * inv.t.x + h.b * inv.t.y);
            q.hs.push_back(HalfPlane{na, nb, nc, h.strict}.normalized());
        }
        out.pieces.push_back(q);
    }
    return out;
}

Region hull(const std::vector<Region>& regions) {
    std::vector<Vec2> pts, rays;
    bool any = false;
    for (const auto& R : regions)
        for (const auto& piece : R.pieces) {
            any = true;
            VRep v = vrep(piece);
            if (v.whole) return Region{{Piece{}}};
            for (const auto& p : v.pts) push_unique(pts, p);
            for (const auto& r : v.rays) push_unique(rays, r);
        }
    if (!any) throw StructuralError("hull of an empty region list");
    if (rays_span_plane(rays)) return Region{{Piece{}}};
    auto hs = facets(pts, rays);
    if (hs.empty()) throw StructuralError("hull is not full-dimensional");
    return Region{{Piece{hs}}};
}

std::vector<PipelineStage> continuation_pipeline() {
    std::vector<PipelineStage> st;
    Region R1 = region_R1();
    st.push_back({"R1", R1});
    Region pR1 = transform_region(phi(), R1);
    st.push_back({"phi(R1)", pR1});
    Region R2 = hull({R1, pR1});
    st.push_back({"R2", R2});
    Region sR2 = transform_region(psi(), R2);
    st.push_back({"psi(R2)", sR2});
    Region R3 = hull({R2, sR2});
    st.push_back({"R3", R3});
    Region pR3 = transform_region(phi(), R3);
    st.push_back({"phi(R3)", pR3});
    st.push_back({"final", hull({R3, pR3})});
    return st;
}

BoxCoverage box_coverage(const Region& R, long lo, long hi, long n) {
    BoxCoverage c;
    Q step = n > 1 ? Q(hi - lo) / (n - 1) : Q(0);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            Vec2 p{lo + step * i, lo + step * j};
            ++c.total;
            if (R.contains(p)) ++c.inside;
        }
    return c;
}

PolarLine PolarLine::normalized() const {
    Q k = a != 0 ? a : b;
    if (k == 0) return *this;
    return {a / k, b / k, c / k};
}

bool PolarLine::operator<(const PolarLine& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
}

std::string PolarLine::str() const {
    std::ostringstream os;
    os << qstr(a) << "*s + " << qstr(b) << "*w + " << qstr(c) << " = 0";
    return os.str();
}

cplx CompletionFactor::poly(cplx s, cplx w) const {
    cplx v = 1.0;
    for (const auto& l : P)
        v *= l.a.convert_to<double>() * s + l.b.convert_to<double>() * w + l.c.convert_to<double>();
    return v;
}

cplx CompletionFactor::Phi(cplx s, cplx) const {
    cplx v = 1.0;
    for (const auto& d : Sf)
        for (const auto& g : d.gamma) v *= 1.0 - d.alpha * g * g * std::pow(d.norm, 2.0 * s - 2.0);
    return v;
}

cplx CompletionFactor::Psi(cplx, cplx w) const {
    cplx v = 1.0;
    for (const auto& d : Sf) v *= 1.0 - d.beta * d.beta * std::pow(d.norm, 2.0 * w - 2.0);
    return v;
}

cplx CompletionFactor::xi(cplx s, cplx w) const {
    auto app = [](const AffineMap2& f, cplx s0, cplx w0) {
        auto d = [](const Q& q) { return q.convert_to<double>(); };
        return std::pair<cplx, cplx>{d(f.M.a) * s0 + d(f.M.b) * w0 + d(f.t.x), d(f.M.c) * s0 + d(f.M.d) * w0 + d(f.t.y)};
    };
    auto [s1, w1] = app(phi(), s, w);
    auto [s2, w2] = app(psi(), s, w);
    auto [s3, w3] = app(psi().compose(phi()), s, w);
    return poly(s, w) * Phi(s, w) * Phi(s1, w1) * Phi(s2, w2) * Phi(s3, w3) * Psi(s, w) * Psi(s1, w1);
}

CompletionFactor standard_completion(std::vector<LocalFactorData> Sf) {
    CompletionFactor c;
    c.P = {{0, 1, 0}, {0, 1, -1}, {3, 1, Q(-3) / 2}, {3, 1, Q(-5) / 2}, {3, 2, -3}};
    c.Sf = std::move(Sf);
    return c;
}

std::vector<PolarLine> polar_divisor(const CompletionFactor& xi) {
    std::vector<PolarLine> out;
    for (const auto& l : xi.P) out.push_back(l.normalized());
    return out;
}

std::vector<PolarLine> transport_poles(const AffineMap2& f, const std::vector<PolarLine>& lines) {
    std::vector<PolarLine> out;
    for (const auto& l : lines) {
        PolarLine n{l.a * f.M.a + l.b * f.M.c, l.a * f.M.b + l.b * f.M.d, l.a * f.t.x + l.b * f.t.y + l.c};
        out.push_back(n.normalized());
    }
    return out;
}

std::vector<PolarLine> polar_orbit(const std::vector<AffineMap2>& group, const std::vector<PolarLine>& lines) {
    std::vector<PolarLine> out;
    for (const auto& g : group)
        for (const auto& l : transport_poles(g, lines))
            if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ddslab::fegroup
