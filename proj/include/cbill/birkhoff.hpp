#pragma once

// Framed k-gons, the Birkhoff distribution D^k, concordant lengths, tangent functions,
// the Lambda locus and the integral planes of D^4.

#include <optional>
#include <vector>

#include <Eigen/SVD>

#include "cbill/reflectivity.hpp"
#include "cbill/triangular_fields.hpp"

namespace cbill {

struct FramedVertex {
    Vec2c A;
    ProjLine L;
};

struct FramedKGon {
    std::vector<FramedVertex> vertices;

    std::size_t size() const { return vertices.size(); }
    const FramedVertex& operator[](long j) const {
        long k = static_cast<long>(vertices.size());
        return vertices[static_cast<std::size_t>(((j % k) + k) % k)];
    }
};

inline void validate(const FramedKGon& g, double tol = 1e-9) {
    if (g.size() < 3) throw GeometryError(ErrorKind::DegenerateInput, "framed gon needs k >= 3");
    long k = static_cast<long>(g.size());
    for (long j = 0; j < k; ++j) {
        const Vec2c &P = g[j - 1].A, &A = g[j].A, &N = g[j + 1].A;
        double scale = 1.0 + A.norm();
        if ((A - P).norm() < tol * scale || (A - N).norm() < tol * scale)
            throw GeometryError(ErrorKind::DegenerateInput, "neighbor vertices coincide");
        if (is_isotropic(g[j].L) || is_isotropic_vector(P - A) || is_isotropic_vector(N - A))
            throw GeometryError(ErrorKind::IsotropicEdge, "isotropic frame line or edge");
        if (incidence_residual(g[j].L, ProjPoint::affine(A)) > tol)
            throw GeometryError(ErrorKind::DegenerateInput, "frame line misses its vertex");
        ProjLine e1 = join(ProjPoint::affine(P), ProjPoint::affine(A)), e2 = join(ProjPoint::affine(A), ProjPoint::affine(N));
        if (line_distance(e1, e2) < tol || line_distance(e1, g[j].L) < tol || line_distance(e2, g[j].L) < tol)
            throw GeometryError(ErrorKind::DegenerateInput, "edge lines and frame line are not distinct");
        ReflectionVerdict v = reflection_law_verdict(ProjPoint::affine(P), ProjPoint::affine(A), ProjPoint::affine(N), g[j].L, tol);
        if (v.kind != VerdictKind::SymmetricNonisotropic)
            throw GeometryError(ErrorKind::NotAReflection, "edges are not symmetric about the frame line");
    }
}

// Exterior bisector where alpha_j = +1, interior where alpha_j = -1.
inline FramedKGon frame_real_kgon(const std::vector<Vec2c>& pts, const std::vector<int>& alpha) {
    if (pts.size() != alpha.size()) throw GeometryError(ErrorKind::Malformed, "alpha length differs from vertex count");
    FramedKGon g;
    long k = static_cast<long>(pts.size());
    for (long j = 0; j < k; ++j) {
        const Vec2c& A = pts[static_cast<std::size_t>(j)];
        const Vec2c& P = pts[static_cast<std::size_t>((j + k - 1) % k)];
        const Vec2c& N = pts[static_cast<std::size_t>((j + 1) % k)];
        if ((P - A).norm() < 1e-12 || (N - A).norm() < 1e-12) throw GeometryError(ErrorKind::DegenerateInput, "degenerate gon");
        int a = alpha[static_cast<std::size_t>(j)];
        if (a != 1 && a != -1) throw GeometryError(ErrorKind::Malformed, "alpha entries must be +-1");
        Vec2c dir = bisector_hint(A, P, N, a == 1);
        if (dir.norm() < 1e-12) throw GeometryError(ErrorKind::DegenerateInput, "straight angle at a vertex");
        g.vertices.push_back({A, ProjLine::through(A, dir)});
    }
    validate(g);
    return g;
}

// Framing by mirror tangents of an orbit.
inline FramedKGon frame_orbit(const Billiard& b, const Orbit& o) {
    FramedKGon g;
    for (std::size_t j = 0; j < o.vertices.size(); ++j)
        g.vertices.push_back({o.vertices[j].A, b.mirrors[j].tangent_line(o.vertices[j].t)});
    return g;
}

// l_j = |A_j A_{j+1}| normalized concordantly at every vertex; absent when the sign holonomy is -1.
inline std::optional<std::vector<cplx>> concordant_lengths(const FramedKGon& g) {
    validate(g);
    long k = static_cast<long>(g.size());
    std::vector<cplx> l(static_cast<std::size_t>(k));
    l[0] = complex_length(g[1].A - g[0].A);
    cplx cur = l[0];
    for (long j = 1; j <= k; ++j) {
        // at A_j the edges are j-1 (towards A_{j-1}) and j (towards A_{j+1})
        ConcordantPair p = concordant_pair(g[j - 1].A, g[j].A, g[j + 1].A, g[j].L);
        cur = cur * (p.bc / p.ba);
        if (j < k) l[static_cast<std::size_t>(j)] = cur;
    }
    double hol = (cur / l[0]).real();
    if (hol < 0.0) return std::nullopt;
    return l;
}

namespace detail {

inline cplx zeta_of(const ProjLine& L) {
    DirectionCoord z = DirectionCoord::of_line(L);
    if (z.is_isotropic()) throw GeometryError(ErrorKind::IsotropicEdge, "isotropic frame line");
    return z.value();
}

inline cplx z_of(const Vec2c& v) { return (v(1) - kI * v(0)) / (v(1) + kI * v(0)); }

// dz for the direction chart at v along dv
inline cplx dz_of(const Vec2c& v, const Vec2c& dv) {
    cplx d = v(1) + kI * v(0);
    return 2.0 * kI * (v(0) * dv(1) - v(1) * dv(0)) / (d * d);
}

// unit vector of the direction zeta: v.v = zeta for v = ((1 - zeta)/2i, (1 + zeta)/2)
inline Vec2c unit_of_zeta(cplx zeta) {
    return Vec2c((1.0 - zeta) / (2.0 * kI), (1.0 + zeta) / 2.0) / std::sqrt(zeta);
}

} // namespace detail

// Tangent vector of the framed-gon space: vertex velocities and frame-direction velocities.
struct FramedTangent {
    std::vector<Vec2c> dA;
    std::vector<cplx> dzeta;

    Eigen::VectorXcd flat() const {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(3 * dA.size()));
        for (std::size_t j = 0; j < dA.size(); ++j) {
            v(static_cast<Eigen::Index>(2 * j)) = dA[j](0);
            v(static_cast<Eigen::Index>(2 * j + 1)) = dA[j](1);
            v(static_cast<Eigen::Index>(2 * dA.size() + j)) = dzeta[j];
        }
        return v;
    }
};

// Linearized reflection constraints zeta_j^2 = z(A_{j-1} - A_j) z(A_{j+1} - A_j) and contact
// constraints det(u_j, dA_j) = 0, rows scaled to unit norm; unknowns (dA_1..dA_k, dzeta_1..dzeta_k).
inline Eigen::MatrixXcd birkhoff_constraints(const FramedKGon& g) {
    long k = static_cast<long>(g.size());
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * k, 3 * k);
    for (long j = 0; j < k; ++j) {
        Vec2c vp = g[j - 1].A - g[j].A, vn = g[j + 1].A - g[j].A;
        cplx zp = detail::z_of(vp), zn = detail::z_of(vn), zeta = detail::zeta_of(g[j].L);
        long jp = (j + k - 1) % k, jn = (j + 1) % k;
        // d(zeta^2 - zp zn) = 2 zeta dzeta - dzp zn - zp dzn, with dv = dA_neighbor - dA_j
        for (int c = 0; c < 2; ++c) {
            Vec2c e = Vec2c::Zero();
            e(c) = 1.0;
            cplx dzp = detail::dz_of(vp, e), dzn = detail::dz_of(vn, e);
            M(j, 2 * jp + c) += -dzp * zn;
            M(j, 2 * jn + c) += -zp * dzn;
            M(j, 2 * j + c) += dzp * zn + zp * dzn;
        }
        M(j, 2 * k + j) = 2.0 * zeta;
        Vec2c u = detail::unit_of_zeta(zeta);
        M(k + j, 2 * j) = -u(1);
        M(k + j, 2 * j + 1) = u(0);
    }
    for (long r = 0; r < M.rows(); ++r) M.row(r) /= M.row(r).norm();
    return M;
}

struct DistributionReport {
    int dimension;
    Eigen::MatrixXcd basis;  // columns: Hermitian-orthonormal basis of D^k(x) in flat coordinates
    Eigen::VectorXd singular_values;
    bool singular;  // constraint rank below 2k: a singular point of the constraint variety
};

inline DistributionReport distribution_dimension(const FramedKGon& g, double rank_tol = 1e-9) {
    validate(g);
    Eigen::MatrixXcd M = birkhoff_constraints(g);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rank_tol * s(0)) ++rank;
    int n = static_cast<int>(M.cols());
    return {n - rank, svd.matrixV().rightCols(n - rank), s, rank < M.rows()};
}

// Relative distance of a tangent vector from D^k(x).
inline double distribution_residual(const FramedKGon& g, const FramedTangent& v) {
    Eigen::VectorXcd x = v.flat();
    return (birkhoff_constraints(g) * x).norm() / x.norm();
}

// The vector of D^k(x) in which A_j moves with speed s_j along u_j.
inline FramedTangent tangent_from_speeds(const FramedKGon& g, const std::vector<cplx>& s) {
    long k = static_cast<long>(g.size());
    FramedTangent t;
    for (long j = 0; j < k; ++j) t.dA.push_back(s[static_cast<std::size_t>(j)] * detail::unit_of_zeta(detail::zeta_of(g[j].L)));
    for (long j = 0; j < k; ++j) {
        long jp = (j + k - 1) % k, jn = (j + 1) % k;
        Vec2c vp = g[j - 1].A - g[j].A, vn = g[j + 1].A - g[j].A;
        const Vec2c &dj = t.dA[static_cast<std::size_t>(j)], &dp = t.dA[static_cast<std::size_t>(jp)],
                    &dn = t.dA[static_cast<std::size_t>(jn)];
        cplx dzp = detail::dz_of(vp, dp - dj), dzn = detail::dz_of(vn, dn - dj);
        cplx zeta = detail::zeta_of(g[j].L);
        t.dzeta.push_back((dzp * detail::z_of(vn) + detail::z_of(vp) * dzn) / (2.0 * zeta));
    }
    return t;
}

// s_j = dA_j . u_j and the rotation rate omega_j = -(i/2) dzeta_j / zeta_j of the frame line.
inline std::vector<cplx> vertex_speeds(const FramedKGon& g, const FramedTangent& t) {
    std::vector<cplx> s;
    for (std::size_t j = 0; j < g.size(); ++j)
        s.push_back(bilinear_form(t.dA[j], detail::unit_of_zeta(detail::zeta_of(g.vertices[j].L))));
    return s;
}

inline std::vector<cplx> frame_rotation_rates(const FramedKGon& g, const FramedTangent& t) {
    std::vector<cplx> w;
    for (std::size_t j = 0; j < g.size(); ++j) w.push_back(-0.5 * kI * t.dzeta[j] / detail::zeta_of(g.vertices[j].L));
    return w;
}

// d theta_j(X, Y) for the contact forms theta_j = det(u_j, dA_j).
inline std::vector<cplx> contact_two_forms(const FramedKGon& g, const FramedTangent& X, const FramedTangent& Y) {
    auto sx = vertex_speeds(g, X), sy = vertex_speeds(g, Y);
    auto wx = frame_rotation_rates(g, X), wy = frame_rotation_rates(g, Y);
    std::vector<cplx> r;
    for (std::size_t j = 0; j < g.size(); ++j) r.push_back(wx[j] * sy[j] - wy[j] * sx[j]);
    return r;
}

inline std::vector<cplx> tangent_functions(const FramedKGon& g, double tol = 1e-12) {
    validate(g);
    std::vector<cplx> t;
    for (std::size_t j = 0; j < g.size(); ++j) {
        Vec2c d = g.vertices[j].L.direction();
        DirectionCoord z = DirectionCoord::of_vector(Vec2c(-d(1), d(0)));
        DirectionCoord w = DirectionCoord::of_vector(g[static_cast<long>(j) + 1].A - g.vertices[j].A);
        cplx num = z.p * w.q - w.p * z.q, den = z.p * w.q + w.p * z.q;
        double scale = std::abs(z.p * w.q) + std::abs(w.p * z.q);
        if (std::abs(num) < tol * scale || std::abs(den) < tol * scale)
            throw GeometryError(ErrorKind::DegenerateInput, "edge coincides with the frame line or its normal");
        t.push_back(kI * num / den);
    }
    return t;
}

inline cplx lambda_residual(const FramedKGon& g) {
    if (g.size() != 4) throw GeometryError(ErrorKind::DegenerateInput, "lambda is defined for quadrilaterals");
    auto l = concordant_lengths(g);
    if (!l) throw GeometryError(ErrorKind::ComponentError, "no concordant length collection");
    const auto& v = *l;
    return v[0] * v[2] - v[1] * v[3];
}

inline bool on_lambda(const FramedKGon& g, double rel_tol = 1e-9) {
    auto l = concordant_lengths(g);
    if (!l) throw GeometryError(ErrorKind::ComponentError, "no concordant length collection");
    double m = 0.0;
    for (const cplx& a : *l)
        for (const cplx& b : *l) m = std::max(m, std::abs(a * b));
    return std::abs(lambda_residual(g)) < rel_tol * m;
}

// Integral plane of D^4 in nu-coordinates nu_j = c_j s_j (c_1 = c_2 = 1, c_3, c_4 fixed by the
// normal form) with rows (0, l1, eta, -l4) and (l1, 0, -l2, eta').
struct IntegralPlane {
    cplx eta, eta_prime;
    Eigen::Matrix<cplx, 2, 4> rows;
    std::array<cplx, 4> nu_scale;
    std::array<FramedTangent, 2> basis;  // tangent vectors of the two rows
    std::vector<cplx> lengths;

    cplx product_identity_residual() const {
        const auto& l = lengths;
        return eta * eta_prime - (l[1] * l[3] - l[0] * l[2]);
    }
};

namespace detail {

// omega_j(X^(i)) for the speed basis X^(i)
inline Eigen::Matrix4cd rotation_rate_matrix(const FramedKGon& g) {
    Eigen::Matrix4cd W;
    for (int i = 0; i < 4; ++i) {
        std::vector<cplx> s(4, 0.0);
        s[static_cast<std::size_t>(i)] = 1.0;
        auto w = frame_rotation_rates(g, tangent_from_speeds(g, s));
        for (int j = 0; j < 4; ++j) W(j, i) = w[static_cast<std::size_t>(j)];
    }
    return W;
}

inline FramedTangent from_speeds4(const FramedKGon& g, const std::array<cplx, 4>& s) {
    return tangent_from_speeds(g, std::vector<cplx>(s.begin(), s.end()));
}

} // namespace detail

// The integral plane of the one-parameter family at x selected by eta.
inline IntegralPlane integral_plane(const FramedKGon& g, cplx eta) {
    if (g.size() != 4) throw GeometryError(ErrorKind::DegenerateInput, "integral planes are built for k = 4");
    auto lopt = concordant_lengths(g);
    if (!lopt) throw GeometryError(ErrorKind::ComponentError, "no concordant length collection");
    if (on_lambda(g)) throw GeometryError(ErrorKind::SingularState, "state lies on the Lambda locus");
    const auto& l = *lopt;
    Eigen::Matrix4cd W = detail::rotation_rate_matrix(g);
    // X = (0, 1, x3, x4): omega_1(X) = 0; Y = (1, 0, y3, y4): omega_2(Y) = 0; then x3 y4 = K
    cplx x4 = -W(0, 1) / W(0, 3);
    cplx y3 = -W(1, 0) / W(1, 2);
    cplx K = y3 * (W(2, 1) + W(2, 3) * x4) / W(2, 3);
    std::array<cplx, 4> c{1.0, 1.0, -l[1] / (l[0] * y3), -l[3] / (l[0] * x4)};
    if (std::abs(eta) < 1e-300) throw GeometryError(ErrorKind::DegenerateInput, "eta must be nonzero off Lambda");
    cplx x3 = eta / (l[0] * c[2]);
    cplx y4 = K / x3;
    IntegralPlane P;
    P.lengths = l;
    P.nu_scale = c;
    std::array<cplx, 4> X{0.0, 1.0, x3, x4}, Y{1.0, 0.0, y3, y4};
    for (int j = 0; j < 4; ++j) {
        P.rows(0, j) = l[0] * c[static_cast<std::size_t>(j)] * X[static_cast<std::size_t>(j)];
        P.rows(1, j) = l[0] * c[static_cast<std::size_t>(j)] * Y[static_cast<std::size_t>(j)];
    }
    P.eta = P.rows(0, 2);
    P.eta_prime = P.rows(1, 3);
    P.basis = {detail::from_speeds4(g, X), detail::from_speeds4(g, Y)};
    return P;
}

// The member of the family containing the tangent vector `seed` (which must lie in some integral plane).
inline IntegralPlane integral_plane_through(const FramedKGon& g, const FramedTangent& seed, double tol = 1e-6) {
    auto s = vertex_speeds(g, seed);
    double scale = std::abs(s[0]) + std::abs(s[1]) + std::abs(s[2]) + std::abs(s[3]);
    Eigen::Matrix4cd W = detail::rotation_rate_matrix(g);
    cplx y3 = -W(1, 0) / W(1, 2);
    cplx x3;
    if (std::abs(s[1]) > 1e-12 * scale) {
        x3 = (s[2] - s[0] * y3) / s[1];
    } else {
        // seed parallel to Y: fix y4 and recover x3 from x3 y4 = K
        if (std::abs(s[3]) < 1e-12 * scale) throw GeometryError(ErrorKind::DegenerateInput, "seed selects no plane");
        cplx x4 = -W(0, 1) / W(0, 3);
        cplx K = y3 * (W(2, 1) + W(2, 3) * x4) / W(2, 3);
        x3 = K * s[0] / s[3];
    }
    auto lopt = concordant_lengths(g);
    if (!lopt) throw GeometryError(ErrorKind::ComponentError, "no concordant length collection");
    cplx c3 = -(*lopt)[1] / ((*lopt)[0] * y3);
    IntegralPlane P = integral_plane(g, x3 * (*lopt)[0] * c3);
    // the seed must be s_2 X + s_1 Y
    auto sx = vertex_speeds(g, P.basis[0]), sy = vertex_speeds(g, P.basis[1]);
    cplx r3 = s[2] - (s[1] * sx[2] + s[0] * sy[2]);
    cplx r4 = s[3] - (s[1] * sx[3] + s[0] * sy[3]);
    if (std::abs(r3) + std::abs(r4) > tol * scale) throw GeometryError(ErrorKind::SingularState, "seed lies in no integral plane");
    return P;
}

// Largest principal angle between span(a) and span(b) (columns), complex Hermitian geometry.
inline double max_principal_angle(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qa(a), qb(b);
    Eigen::MatrixXcd Qa = qa.householderQ() * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::MatrixXcd Qb = qb.householderQ() * Eigen::MatrixXcd::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Qa.adjoint() * Qb);
    double cmin = svd.singularValues().minCoeff();
    // sine form stays accurate for small angles
    Eigen::MatrixXcd R = Qb - Qa * (Qa.adjoint() * Qb);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svr(R);
    double smax = svr.singularValues().maxCoeff();
    return std::atan2(smax, std::max(cmin, 0.0));
}

// Central-difference tangent of the lifted orbit family (A_j, T_{A_j} mirror_j) along t1 (which = 0)
// or t2 (which = 1), continued from the orbit o.
inline FramedTangent lifted_family_tangent(const Billiard& b, const Orbit& o, int which, double h = 1e-5) {
    cplx t1 = o.vertices[0].t, t2 = o.vertices[1].t;
    cplx d1 = which == 0 ? h : 0.0, d2 = which == 1 ? h : 0.0;
    Orbit p = extend_orbit(b, t1 + d1, t2 + d2, &o), m = extend_orbit(b, t1 - d1, t2 - d2, &o);
    if (!p.closed || !m.closed) throw GeometryError(ErrorKind::ExtensionFailure, "family does not close near the orbit");
    FramedKGon gp = frame_orbit(b, p), gm = frame_orbit(b, m);
    FramedTangent T;
    for (std::size_t j = 0; j < o.vertices.size(); ++j) {
        T.dA.push_back((p.vertices[j].A - m.vertices[j].A) / (2 * h));
        T.dzeta.push_back((detail::zeta_of(gp.vertices[j].L) - detail::zeta_of(gm.vertices[j].L)) / (2 * h));
    }
    return T;
}

} // namespace cbill
