#pragma once

// Complex projective plane with the complexified Euclidean form.
// Points are (h0 : h1 : h2) with affine chart z1 = h1/h0, z2 = h2/h0.

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "cbill/errors.hpp"

namespace cbill {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Vec3c = Eigen::Vector3cd;
using Mat2c = Eigen::Matrix2cd;
using Mat3c = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

// default relative tolerances
inline constexpr double kProjTol = 1e-10;
inline constexpr double kIsoTol = 1e-12;
inline constexpr double kCoincidenceTol = 1e-12;

inline cplx bilinear_form(const Vec2c& v, const Vec2c& w) { return v(0) * w(0) + v(1) * w(1); }

inline cplx det2(const Vec2c& a, const Vec2c& b) { return a(0) * b(1) - a(1) * b(0); }

inline Vec2c vec2(cplx x, cplx y) { return Vec2c(x, y); }

namespace detail {

// Eigen's cross() conjugates complex operands; incidence needs the bilinear version
inline Vec3c cross(const Vec3c& a, const Vec3c& b) {
    return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

inline Vec3c normalize_max(const Vec3c& h) {
    Eigen::Index k = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
        // ties go to the lowest index so that normalization is idempotent
        if (std::abs(h(i)) > best * (1.0 + 1e-14)) {
            best = std::abs(h(i));
            k = i;
        }
    }
    if (best == 0.0) throw GeometryError(ErrorKind::DegenerateInput, "zero homogeneous triple");
    return h / h(k);
}

inline double cross_residual(const Vec3c& a, const Vec3c& b) {
    return cross(a, b).norm() / (a.norm() * b.norm());
}

} // namespace detail

struct ProjPoint {
    Vec3c h;

    ProjPoint() : h(1, 0, 0) {}
    explicit ProjPoint(const Vec3c& v) : h(detail::normalize_max(v)) {}
    ProjPoint(cplx h0, cplx h1, cplx h2) : ProjPoint(Vec3c(h0, h1, h2)) {}

    static ProjPoint affine(const Vec2c& z) { return ProjPoint(Vec3c(1.0, z(0), z(1))); }
    static ProjPoint affine(cplx x, cplx y) { return ProjPoint(Vec3c(1.0, x, y)); }
    static ProjPoint at_infinity(const Vec2c& dir) { return ProjPoint(Vec3c(0.0, dir(0), dir(1))); }

    bool is_finite(double tol = kIsoTol) const { return std::abs(h(0)) > tol * h.norm(); }
    Vec2c xy() const {
        if (!is_finite()) throw GeometryError(ErrorKind::DegenerateInput, "point at infinity has no affine chart");
        return Vec2c(h(1) / h(0), h(2) / h(0));
    }
};

struct ProjLine {
    Vec3c c;

    ProjLine() : c(1, 0, 0) {}
    explicit ProjLine(const Vec3c& v) : c(detail::normalize_max(v)) {}
    ProjLine(cplx c0, cplx c1, cplx c2) : ProjLine(Vec3c(c0, c1, c2)) {}

    static ProjLine infinity() { return ProjLine(1.0, 0.0, 0.0); }
    // line through an affine point with a given direction vector
    static ProjLine through(const Vec2c& p, const Vec2c& dir) {
        cplx c1 = dir(1), c2 = -dir(0);
        return ProjLine(-(c1 * p(0) + c2 * p(1)), c1, c2);
    }

    Vec2c direction() const { return Vec2c(-c(2), c(1)); }
};

inline double incidence_residual(const ProjLine& l, const ProjPoint& p) {
    return std::abs(l.c(0) * p.h(0) + l.c(1) * p.h(1) + l.c(2) * p.h(2)) / (l.c.norm() * p.h.norm());
}

inline bool proj_equal(const ProjPoint& a, const ProjPoint& b, double tol = kProjTol) {
    return detail::cross_residual(a.h, b.h) < tol;
}
inline bool proj_equal(const ProjLine& a, const ProjLine& b, double tol = kProjTol) {
    return detail::cross_residual(a.c, b.c) < tol;
}
inline double line_distance(const ProjLine& a, const ProjLine& b) { return detail::cross_residual(a.c, b.c); }
inline double point_distance(const ProjPoint& a, const ProjPoint& b) { return detail::cross_residual(a.h, b.h); }

inline ProjLine join(const ProjPoint& a, const ProjPoint& b) {
    Vec3c c = detail::cross(a.h, b.h);
    if (c.norm() <= kCoincidenceTol * a.h.norm() * b.h.norm())
        throw GeometryError(ErrorKind::DegenerateInput, "join of coincident points");
    return ProjLine(c);
}

inline ProjPoint meet(const ProjLine& a, const ProjLine& b) {
    Vec3c h = detail::cross(a.c, b.c);
    if (h.norm() <= kCoincidenceTol * a.c.norm() * b.c.norm())
        throw GeometryError(ErrorKind::DegenerateInput, "meet of coincident lines");
    return ProjPoint(h);
}

inline bool is_isotropic_vector(const Vec2c& v, double tol = kIsoTol) {
    double n = v.squaredNorm();
    if (n == 0.0) return true;
    return std::abs(bilinear_form(v, v)) <= tol * n;
}

inline bool is_isotropic(const ProjLine& l, double tol = kIsoTol) {
    double n = std::norm(l.c(1)) + std::norm(l.c(2));
    if (n <= tol * tol * l.c.squaredNorm()) return true;  // infinity line
    return std::abs(l.c(1) * l.c(1) + l.c(2) * l.c(2)) <= tol * n;
}

// Point of the infinity line in the chart z(I1) = 0, z(I2) = inf, stored as z = p/q.
struct DirectionCoord {
    cplx p{0.0}, q{1.0};

    DirectionCoord() = default;
    DirectionCoord(cplx p_, cplx q_) : p(p_), q(q_) {
        double s = std::max(std::abs(p), std::abs(q));
        if (s == 0.0) throw GeometryError(ErrorKind::DegenerateInput, "zero direction coordinate");
        p /= s;
        q /= s;
    }
    static DirectionCoord finite(cplx z) { return DirectionCoord(z, 1.0); }
    static DirectionCoord of_vector(const Vec2c& v) { return DirectionCoord(v(1) - kI * v(0), v(1) + kI * v(0)); }
    static DirectionCoord of_line(const ProjLine& l) { return of_vector(l.direction()); }
    static DirectionCoord of_angle(double theta) { return finite(-std::exp(2.0 * kI * theta)); }

    bool is_infinite(double tol = kIsoTol) const { return std::abs(q) <= tol * std::abs(p); }
    bool is_isotropic(double tol = kIsoTol) const { return std::abs(p) <= tol * std::abs(q) || is_infinite(tol); }
    cplx value() const { return p / q; }
    Vec2c vector() const { return Vec2c((q - p) / (2.0 * kI), (p + q) / 2.0); }
};

inline double chordal_distance(const DirectionCoord& a, const DirectionCoord& b) {
    double na = std::hypot(std::abs(a.p), std::abs(a.q));
    double nb = std::hypot(std::abs(b.p), std::abs(b.q));
    return std::abs(a.p * b.q - b.p * a.q) / (na * nb);
}

// zeta^2 / z for mirror zeta = a/b and incident z = p/q
inline DirectionCoord reflect_direction(const DirectionCoord& incident, const DirectionCoord& mirror) {
    if (mirror.is_isotropic()) throw GeometryError(ErrorKind::DegenerateMirror, "reflection in an isotropic direction");
    return DirectionCoord(mirror.p * mirror.p * incident.q, mirror.q * mirror.q * incident.p);
}

// Linear part of the symmetry about a non-isotropic direction v.
inline Mat2c symmetry_linear(const Vec2c& v) {
    cplx vv = bilinear_form(v, v);
    if (is_isotropic_vector(v)) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic symmetry axis");
    return 2.0 * (v * v.transpose()) / vv - Mat2c::Identity();
}

// 3x3 homogeneous matrix of the complex-isometric involution fixing l pointwise.
inline Mat3c symmetry_matrix(const ProjLine& l) {
    if (is_isotropic(l)) throw GeometryError(ErrorKind::DegenerateMirror, "symmetry about an isotropic line");
    cplx c1 = l.c(1), c2 = l.c(2);
    Vec2c q0 = -l.c(0) * Vec2c(c1, c2) / (c1 * c1 + c2 * c2);
    Mat2c S = symmetry_linear(l.direction());
    Mat3c M = Mat3c::Zero();
    M(0, 0) = 1.0;
    M.block<2, 1>(1, 0) = (Mat2c::Identity() - S) * q0;
    M.block<2, 2>(1, 1) = S;
    return M;
}

inline ProjPoint symmetry_about_line(const ProjPoint& p, const ProjLine& l) {
    return ProjPoint(symmetry_matrix(l) * p.h);
}

inline Vec2c symmetry_about_line(const Vec2c& p, const ProjLine& l) {
    return symmetry_about_line(ProjPoint::affine(p), l).xy();
}

// lines transform contragrediently; M is an involution so M^-T = M^T
inline ProjLine symmetry_of_line(const ProjLine& m, const ProjLine& axis) {
    return ProjLine(symmetry_matrix(axis).transpose() * m.c);
}

enum class VerdictKind { SymmetricNonisotropic, IsotropicEdgeOnMirror, VertexCoincidence, Violated };

inline const char* to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::SymmetricNonisotropic: return "symmetric-nonisotropic";
    case VerdictKind::IsotropicEdgeOnMirror: return "isotropic-edge-on-mirror";
    case VerdictKind::VertexCoincidence: return "vertex-coincidence";
    case VerdictKind::Violated: return "violated";
    }
    return "unknown";
}

struct ReflectionVerdict {
    VerdictKind kind = VerdictKind::Violated;
    double residual = 0.0;

    bool holds() const { return kind != VerdictKind::Violated; }
};

inline ReflectionVerdict reflection_law_verdict(const ProjPoint& prev, const ProjPoint& vertex, const ProjPoint& next,
                                                const ProjLine& mirror_line, double tol,
                                                double coincidence_tol = kCoincidenceTol) {
    if (point_distance(prev, vertex) < coincidence_tol || point_distance(next, vertex) < coincidence_tol)
        return {VerdictKind::VertexCoincidence, 0.0};
    ProjLine e1 = join(prev, vertex);
    ProjLine e2 = join(vertex, next);
    if (is_isotropic(mirror_line)) {
        double r = std::min(line_distance(e1, mirror_line), line_distance(e2, mirror_line));
        if (r < tol) return {VerdictKind::IsotropicEdgeOnMirror, 0.0};
        return {VerdictKind::Violated, r};
    }
    DirectionCoord zeta = DirectionCoord::of_line(mirror_line);
    DirectionCoord out = reflect_direction(DirectionCoord::of_line(e1), zeta);
    double r = chordal_distance(out, DirectionCoord::of_line(e2));
    if (r < tol) return {VerdictKind::SymmetricNonisotropic, r};
    return {VerdictKind::Violated, r};
}

// Complex rotation by angle rho (unit Jacobian, SO(2,C)); acts on direction coordinates as z -> e^{2i rho} z.
inline Mat2c rotation(cplx rho) {
    Mat2c R;
    R << std::cos(rho), -std::sin(rho), std::sin(rho), std::cos(rho);
    return R;
}

} // namespace cbill
