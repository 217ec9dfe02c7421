#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "ddslab/common.hpp"

namespace ddslab::fegroup {

using Q = boost::multiprecision::cpp_rational;

Q parse_q(const std::string& s);
std::string qstr(const Q& q);

struct Vec2 {
    Q x, y;
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
};

struct Mat2 {
    Q a, b, c, d;  // [[a, b], [c, d]]
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const;
    Q det() const { return a * d - b * c; }
    bool operator==(const Mat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

// x -> M x + t on the (s, w) coordinates.
struct AffineMap2 {
    Mat2 M;
    Vec2 t;
    std::string name;

    Vec2 operator()(const Vec2& v) const { return M * v + t; }
    // (this o g)(x) = this(g(x))
    AffineMap2 compose(const AffineMap2& g) const;
    AffineMap2 inverse() const;
    bool is_identity() const;
    bool operator==(const AffineMap2& o) const { return M == o.M && t == o.t; }
    std::string str() const;
};

AffineMap2 identity_map();
AffineMap2 phi();  // (s, w) -> (1 - s, w + 3s - 3/2)
AffineMap2 psi();  // (s, w) -> (s + w - 1/2, 1 - w)

// Closure under composition; throws StructuralError if not reached within max_steps compositions.
std::vector<AffineMap2> generate_group(const AffineMap2& g1, const AffineMap2& g2, int max_steps = 100);

struct FixedSet {
    enum Kind { Empty, Point, Line, Plane } kind = Empty;
    Vec2 point;  // a point of the set (Point, Line)
    Vec2 dir;    // direction (Line)
    std::string str() const;
};

FixedSet fixed_points(const AffineMap2& f);

// a sigma + b tau > c  (>= when strict is false)
struct HalfPlane {
    Q a, b, c;
    bool strict = true;

    bool contains(const Vec2& p) const;
    bool contains_closure(const Vec2& p) const;
    HalfPlane normalized() const;
    bool operator==(const HalfPlane& o) const {
        return a == o.a && b == o.b && c == o.c && strict == o.strict;
    }
    bool operator<(const HalfPlane& o) const;
};

struct Piece {
    std::vector<HalfPlane> hs;  // empty list = whole plane
    bool contains(const Vec2& p) const;
    bool contains_closure(const Vec2& p) const;
    Piece canonical() const;
};

struct Region {
    std::vector<Piece> pieces;
    bool contains(const Vec2& p) const;
    bool contains_closure(const Vec2& p) const;
    bool is_whole_plane() const;
    Region canonical() const;
    bool operator==(const Region& o) const;
    std::string to_csv() const;  // piece,a,b,c,strict
};

Region region_R1();
Region region_two_piece();

// Literal case-system membership for R1 with rational margin eps (system 1 or 2).
bool R1_case_member(int system, const Vec2& p, const Q& eps);

Region transform_region(const AffineMap2& f, const Region& R);
Region hull(const std::vector<Region>& regions);

struct PipelineStage {
    std::string name;
    Region region;
};
std::vector<PipelineStage> continuation_pipeline();

struct BoxCoverage {
    long total = 0;
    long inside = 0;
    bool covered() const { return total == inside; }
};
BoxCoverage box_coverage(const Region& R, long lo, long hi, long n);

// a s + b w + c = 0
struct PolarLine {
    Q a, b, c;
    PolarLine normalized() const;
    bool operator==(const PolarLine& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const PolarLine& o) const;
    bool contains(const Vec2& p) const { return a * p.x + b * p.y + c == 0; }
    std::string str() const;
};

struct LocalFactorData {
    double norm = 2;             // |P|
    cplx alpha = 1.0, beta = 1.0;  // character values at P
    std::vector<cplx> gamma;     // Satake parameters at P
};

struct CompletionFactor {
    std::vector<PolarLine> P;  // linear forms of the polynomial part
    std::vector<LocalFactorData> Sf;

    cplx poly(cplx s, cplx w) const;
    cplx Phi(cplx s, cplx w) const;
    cplx Psi(cplx s, cplx w) const;
    cplx xi(cplx s, cplx w) const;
};

CompletionFactor standard_completion(std::vector<LocalFactorData> Sf = {});
std::vector<PolarLine> polar_divisor(const CompletionFactor& xi);
std::vector<PolarLine> transport_poles(const AffineMap2& f, const std::vector<PolarLine>& lines);
// All images of the lines under the group, deduplicated.
std::vector<PolarLine> polar_orbit(const std::vector<AffineMap2>& group, const std::vector<PolarLine>& lines);

}  // namespace ddslab::fegroup
