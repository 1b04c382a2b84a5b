#pragma once

// Framed triangles with a fixed vertex A and rotation constraint AC = H(AB),
// the line field on them, and its squared-perimeter first integral.

#include <array>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cbill/projective.hpp"

namespace cbill {

// principal branch of sqrt(v.v)
inline cplx complex_length(const Vec2c& v) { return std::sqrt(bilinear_form(v, v)); }

namespace detail {

inline Vec2c unit(const Vec2c& v) {
    if (is_isotropic_vector(v)) throw GeometryError(ErrorKind::IsotropicEdge, "isotropic vector has no unit rescaling");
    return v / complex_length(v);
}

// Both symmetry lines of the pair of lines P->Q1, P->Q2 as unit vectors.
inline std::array<Vec2c, 2> bisector_units(const Vec2c& P, const Vec2c& Q1, const Vec2c& Q2) {
    DirectionCoord z1 = DirectionCoord::of_vector(Q1 - P), z2 = DirectionCoord::of_vector(Q2 - P);
    cplx sp = std::sqrt(z1.p * z2.p), sq = std::sqrt(z1.q * z2.q);
    return {unit(DirectionCoord(sp, sq).vector()), unit(DirectionCoord(-sp, sq).vector())};
}

// candidate (with sign) nearest to ref
inline Vec2c pick_nearest(const std::array<Vec2c, 2>& cands, const Vec2c& ref) {
    Vec2c best = cands[0];
    double bd = 1e300;
    for (const Vec2c& c : cands)
        for (double s : {1.0, -1.0}) {
            double d = (s * c - ref).norm();
            if (d < bd) {
                bd = d;
                best = s * c;
            }
        }
    return best;
}

inline void check_rotation(const Mat2c& H, double tol = 1e-10) {
    if ((H.transpose() * H - Mat2c::Identity()).norm() > tol || std::abs(H.determinant() - 1.0) > tol)
        throw GeometryError(ErrorKind::DegenerateInput, "H is not in SO(2,C)");
    if ((H - Mat2c::Identity()).norm() < tol) throw GeometryError(ErrorKind::DegenerateInput, "H is the identity");
}

} // namespace detail

// Signed lengths |BA|, |BC| that are concordant with respect to the symmetry line L through B.
struct ConcordantPair {
    cplx ba;
    cplx bc;
};

inline ConcordantPair concordant_pair(const Vec2c& A, const Vec2c& B, const Vec2c& C, const ProjLine& L,
                                      double tol = 1e-9) {
    Vec2c e1 = A - B, e2 = C - B;
    if (is_isotropic_vector(e1) || is_isotropic_vector(e2))
        throw GeometryError(ErrorKind::IsotropicEdge, "isotropic edge at the framed vertex");
    ReflectionVerdict v =
        reflection_law_verdict(ProjPoint::affine(A), ProjPoint::affine(B), ProjPoint::affine(C), L, tol);
    if (v.kind != VerdictKind::SymmetricNonisotropic)
        throw GeometryError(ErrorKind::NotAReflection, "edges are not symmetric about the frame line");
    cplx r1 = complex_length(e1), r2 = complex_length(e2);
    Vec2c u1 = e1 / r1, u2 = e2 / r2;
    Vec2c su1 = symmetry_linear(L.direction()) * u1;
    // su1 = kappa * u2 with kappa = +-1
    double kappa = (su1 - u2).norm() < (su1 + u2).norm() ? 1.0 : -1.0;
    return {r1, -kappa * r2};
}

struct FramedTriangleState {
    Vec2c A;
    Mat2c H;
    Vec2c B, C;
    Vec2c uB, uC;  // unit (bilinear) directions of L_B, L_C; their sign fixes the time orientation

    ProjLine L_B() const { return ProjLine::through(B, uB); }
    ProjLine L_C() const { return ProjLine::through(C, uC); }
};

// Frames (B, C) by the bisectors nearest to the hint directions.
inline FramedTriangleState frame_triangle(const Vec2c& A, const Mat2c& H, const Vec2c& B, const Vec2c& C,
                                          const Vec2c& hintB, const Vec2c& hintC) {
    FramedTriangleState s{A, H, B, C, Vec2c::Zero(), Vec2c::Zero()};
    s.uB = detail::pick_nearest(detail::bisector_units(B, A, C), hintB);
    s.uC = detail::pick_nearest(detail::bisector_units(C, A, B), hintC);
    return s;
}

// e1 - e2 (exterior) or e1 + e2 (interior) at P for the edges to Q1, Q2, principal square roots.
inline Vec2c bisector_hint(const Vec2c& P, const Vec2c& Q1, const Vec2c& Q2, bool exterior) {
    Vec2c e1 = (Q1 - P) / complex_length(Q1 - P), e2 = (Q2 - P) / complex_length(Q2 - P);
    return exterior ? Vec2c(e1 - e2) : Vec2c(e1 + e2);
}

// Membership test. The collinear case H = -Id (AB = AC) is admitted: it is the circle boundary case.
inline void validate(const FramedTriangleState& s, double tol = 1e-9) {
    detail::check_rotation(s.H);
    Vec2c b = s.B - s.A, c = s.C - s.A;
    double scale = 1.0 + b.norm() + c.norm();
    if (b.norm() < tol * scale || c.norm() < tol * scale || (s.B - s.C).norm() < tol * scale)
        throw GeometryError(ErrorKind::DegenerateInput, "triangle vertices coincide");
    if (is_isotropic_vector(b) || is_isotropic_vector(c)) throw GeometryError(ErrorKind::IsotropicEdge, "isotropic side");
    Vec2c hb = s.H * b;
    if (std::abs(det2(c, hb)) > tol * c.norm() * hb.norm())
        throw GeometryError(ErrorKind::DegenerateInput, "AC is not the image of AB under H");
    for (const Vec2c* u : {&s.uB, &s.uC})
        if (std::abs(bilinear_form(*u, *u) - 1.0) > tol) throw GeometryError(ErrorKind::DegenerateInput, "frame direction not unit");
    if (std::abs(det2(s.uB, b)) < tol * b.norm() || std::abs(det2(s.uC, c)) < tol * c.norm())
        throw GeometryError(ErrorKind::DegenerateInput, "frame line coincides with a side through A");
    concordant_pair(s.A, s.B, s.C, s.L_B(), tol);
    concordant_pair(s.A, s.C, s.B, s.L_C(), tol);
}

struct TrianglePerimeter {
    cplx ab, bc, ca;
    cplx perimeter() const { return ab + bc + ca; }
    cplx squared() const { return perimeter() * perimeter(); }
};

inline TrianglePerimeter concordant_perimeter(const FramedTriangleState& s) {
    ConcordantPair atB = concordant_pair(s.A, s.B, s.C, s.L_B());
    ConcordantPair atC = concordant_pair(s.B, s.C, s.A, s.L_C());
    // atC = (|CB|, |CA|); rescale so that its BC entry matches the one at B
    cplx f = atB.bc / atC.ba;
    return {atB.ba, atB.bc, f * atC.bc};
}

inline cplx squared_perimeter(const FramedTriangleState& s) { return concordant_perimeter(s).squared(); }

struct FieldVector {
    Vec2c dB, dC;
    double condition;  // inverse relative size of beta; large near the locus where L_C = AC
};

inline constexpr double kFieldConditionLimit = 1e8;

// Velocities (dB, dC) with dB = uB and dC parallel to uC keeping det(C - A, H(B - A)) = 0.
inline FieldVector line_field_direction(const FramedTriangleState& s) {
    Vec2c b = s.B - s.A, c = s.C - s.A;
    cplx beta = det2(s.uC, s.H * b);
    cplx gamma = -det2(c, s.H * s.uB);
    double cond = s.uC.norm() * (s.H * b).norm() / std::max(std::abs(beta), 1e-300);
    if (cond > kFieldConditionLimit) throw GeometryError(ErrorKind::SingularState, "C cannot follow the rotation constraint");
    return {s.uB, (gamma / beta) * s.uC, cond};
}

struct SpiralOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
};

struct SpiralTrajectory {
    std::vector<FramedTriangleState> states;
    std::vector<cplx> p2;
    bool truncated = false;
    std::string diagnostic;

    double max_relative_drift() const {
        double m = 0.0;
        for (const cplx& v : p2) m = std::max(m, std::abs(v - p2.front()) / std::abs(p2.front()));
        return m;
    }
};

namespace detail {

using SpiralVec = std::vector<double>;

inline void pack(const Vec2c& B, const Vec2c& C, SpiralVec& x) {
    x = {B(0).real(), B(0).imag(), B(1).real(), B(1).imag(), C(0).real(), C(0).imag(), C(1).real(), C(1).imag()};
}

inline void unpack(const SpiralVec& x, Vec2c& B, Vec2c& C) {
    B = Vec2c(cplx(x[0], x[1]), cplx(x[2], x[3]));
    C = Vec2c(cplx(x[4], x[5]), cplx(x[6], x[7]));
}

// Frame lines of a nearby state, continued from the reference frame.
inline FramedTriangleState reframe(const FramedTriangleState& ref, const Vec2c& B, const Vec2c& C) {
    return frame_triangle(ref.A, ref.H, B, C, ref.uB, ref.uC);
}

} // namespace detail

// Adaptive Dormand-Prince integration of the line field; records a state every h of time.
inline SpiralTrajectory integrate_spiral(const FramedTriangleState& s0, int steps, double h, const SpiralOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    validate(s0);
    SpiralTrajectory tr;
    tr.states.push_back(s0);
    tr.p2.push_back(squared_perimeter(s0));

    FramedTriangleState ref = s0;
    auto rhs = [&ref](const detail::SpiralVec& x, detail::SpiralVec& dx, double) {
        Vec2c B, C;
        detail::unpack(x, B, C);
        FieldVector f = line_field_direction(detail::reframe(ref, B, C));
        detail::pack(f.dB, f.dC, dx);
    };
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<detail::SpiralVec>());

    detail::SpiralVec x;
    detail::pack(s0.B, s0.C, x);
    double t = 0.0, dt = h;
    try {
        for (int i = 1; i <= steps; ++i) {
            double target = i * h;
            while (t < target - 1e-15 * (1.0 + target)) {
                dt = std::min(dt, target - t);
                int rejects = 0;
                while (stepper.try_step(rhs, x, t, dt) == ode::fail) {
                    if (++rejects > 200 || dt < 1e-14 * h)
                        throw GeometryError(ErrorKind::SingularState, "step size collapsed");
                }
                Vec2c B, C;
                detail::unpack(x, B, C);
                ref = detail::reframe(ref, B, C);
            }
            validate(ref);
            tr.states.push_back(ref);
            tr.p2.push_back(squared_perimeter(ref));
        }
    } catch (const GeometryError& e) {
        tr.truncated = true;
        tr.diagnostic = e.what();
    }
    return tr;
}

// Applies a rotation g about A (a linear map fixing A) to a framed state.
inline FramedTriangleState rotated(const FramedTriangleState& s, const Mat2c& g) {
    FramedTriangleState r = s;
    r.B = s.A + g * (s.B - s.A);
    r.C = s.A + g * (s.C - s.A);
    r.uB = g * s.uB;
    r.uC = g * s.uC;
    r.H = g * s.H * g.inverse();
    return r;
}

} // namespace cbill
