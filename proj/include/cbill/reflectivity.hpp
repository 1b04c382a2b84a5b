#pragma once

// Billiards, orbit folding, k-reflectivity verification, the classified 4-reflective
// families and combination operations.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "cbill/conics.hpp"

namespace cbill {

enum class Law { Usual, Skew };

inline const char* to_string(Law l) { return l == Law::Usual ? "usual" : "skew"; }

struct OrbitVertex {
    cplx t;
    Vec2c A;
};

struct Orbit {
    std::vector<OrbitVertex> vertices;
    std::vector<ReflectionVerdict> verdicts;
    bool closed = false;
    bool degenerate = false;
    double closure_residual = std::numeric_limits<double>::infinity();
};

struct Billiard {
    std::vector<Mirror> mirrors;
    std::vector<Law> laws;  // optional, real mode only
    // closed-form orbit through (t1, t2) when the family is known explicitly
    std::function<Orbit(cplx, cplx)> closed_form;

    std::size_t size() const { return mirrors.size(); }
    const Mirror& mirror(long j) const {
        long k = long(mirrors.size());
        return mirrors[std::size_t(((j % k) + k) % k)];
    }
};

inline void validate(const Billiard& b) {
    if (b.size() < 3) throw GeometryError(ErrorKind::DegenerateInput, "a billiard needs at least three mirrors");
    if (!b.laws.empty() && b.laws.size() != b.size())
        throw GeometryError(ErrorKind::DegenerateInput, "law list length differs from mirror count");
    for (const auto& m : b.mirrors)
        if (m.is_line() && is_isotropic(m.as_line()))
            throw GeometryError(ErrorKind::DegenerateMirror, "isotropic line mirror");
}

struct ExtendOptions {
    double tol = 1e-9;
    double coincidence_tol = kCoincidenceTol;
};

namespace detail {

inline ProjLine mirror_tangent(const Mirror& m, const Vec2c& P) {
    ProjLine T = m.tangent_at_point(P);
    if (is_isotropic(T)) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic tangent line");
    return T;
}

inline bool near(const Vec2c& a, const Vec2c& b, double tol) { return (a - b).norm() <= tol * (1.0 + a.norm() + b.norm()); }

// line leaving `cur` after reflecting the edge prev -> cur in the mirror tangent
inline ProjLine reflected_line(const Mirror& m, const Vec2c& prev, const Vec2c& cur) {
    ProjLine T = mirror_tangent(m, cur);
    DirectionCoord out = reflect_direction(DirectionCoord::of_vector(cur - prev), DirectionCoord::of_line(T));
    return ProjLine::through(cur, out.vector());
}

inline void finish_orbit(const Billiard& b, Orbit& o, const ExtendOptions& opt) {
    std::size_t k = o.vertices.size();
    o.verdicts.assign(k, ReflectionVerdict{});
    for (std::size_t j = 0; j < k; ++j) {
        const Vec2c& P = o.vertices[(j + k - 1) % k].A;
        const Vec2c& A = o.vertices[j].A;
        const Vec2c& N = o.vertices[(j + 1) % k].A;
        ProjLine T = b.mirrors[j].tangent_at_point(A);
        o.verdicts[j] = reflection_law_verdict(ProjPoint::affine(P), ProjPoint::affine(A), ProjPoint::affine(N), T,
                                               opt.tol, opt.coincidence_tol);
    }
    const auto& vk = o.verdicts[k - 1];
    const auto& v1 = o.verdicts[0];
    o.degenerate = vk.kind == VerdictKind::VertexCoincidence || v1.kind == VerdictKind::VertexCoincidence;
    o.closure_residual = std::max(vk.residual, v1.residual);
    o.closed = !o.degenerate && vk.holds() && v1.holds();
}

} // namespace detail

// Fold reflections from A1 = m1(t1), A2 = m2(t2). With a seed, each intersection branch is the
// one nearest to the seed's vertex; without one, every branch combination is tried and the
// smallest closure residual wins.
inline Orbit extend_orbit(const Billiard& b, cplx t1, cplx t2, const Orbit* seed = nullptr,
                          const ExtendOptions& opt = {}) {
    std::size_t k = b.size();
    Vec2c A1 = b.mirrors[0].point(t1), A2 = b.mirrors[1].point(t2);
    if (detail::near(A1, A2, opt.coincidence_tol)) throw GeometryError(ErrorKind::DegenerateInput, "A1 = A2");
    Orbit best;
    bool found = false;
    std::vector<OrbitVertex> verts{{t1, A1}, {t2, A2}};

    std::function<void()> fold = [&]() {
        std::size_t j = verts.size();
        if (j == k) {
            Orbit o;
            o.vertices = verts;
            detail::finish_orbit(b, o, opt);
            bool better = !found || (best.degenerate && !o.degenerate) ||
                          (best.degenerate == o.degenerate && o.closure_residual < best.closure_residual);
            if (better) {
                best = o;
                found = true;
            }
            return;
        }
        const Vec2c& prev = verts[j - 2].A;
        const Vec2c& cur = verts[j - 1].A;
        ProjLine out = detail::reflected_line(b.mirrors[j - 1], prev, cur);
        std::vector<Vec2c> cands = b.mirrors[j].intersect(out).finite_points();
        std::vector<Vec2c> distinct;
        for (const auto& P : cands)
            if (!detail::near(P, cur, 1e-9)) distinct.push_back(P);
        if (distinct.empty()) throw GeometryError(ErrorKind::ExtensionFailure, "no admissible intersection");
        cplx t_ref = seed ? seed->vertices[j].t : cplx(0.0);
        if (seed) {
            const Vec2c& S = seed->vertices[j].A;
            std::size_t arg = 0;
            for (std::size_t i = 1; i < distinct.size(); ++i)
                if ((distinct[i] - S).norm() < (distinct[arg] - S).norm()) arg = i;
            distinct = {distinct[arg]};
        }
        for (const auto& P : distinct) {
            verts.push_back({b.mirrors[j].param_of(P, t_ref), P});
            fold();
            verts.pop_back();
        }
    };
    fold();
    return best;
}

// Real two-dimensional slice of the parameter space of (t1, t2).
struct Patch {
    cplx t1_from, t1_to, t2_from, t2_to;

    cplx t1(int i, int n) const { return t1_from + (t1_to - t1_from) * ((i + 0.5) / n); }
    cplx t2(int j, int n) const { return t2_from + (t2_to - t2_from) * ((j + 0.5) / n); }
};

struct ClosureReport {
    int n = 0;
    double tol = 0.0;
    std::vector<double> residuals;  // row-major, NaN marks a degenerate cell
    double fraction_closed = 0.0;
    double max_residual = 0.0;
    int degenerate_cells = 0;

    double fraction_at(double t) const {
        int good = 0, total = 0;
        for (double r : residuals) {
            if (std::isnan(r)) continue;
            ++total;
            if (r < t) ++good;
        }
        return total ? double(good) / total : 0.0;
    }
    bool passes() const { return fraction_closed >= 0.99 && max_residual < tol; }
};

// Grid of orbits on the patch: the starting cell is seeded by the closed-form generator or by
// branch enumeration, its row is swept outwards, then every column; each cell is seeded by its
// predecessor.
inline ClosureReport verify_k_reflectivity(const Billiard& b, const Patch& patch, int n, double tol,
                                           std::vector<Orbit>* orbits_out = nullptr) {
    validate(b);
    if (n < 1 || !(tol > 0.0)) throw GeometryError(ErrorKind::DegenerateInput, "bad grid or tolerance");
    ExtendOptions opt;
    opt.tol = tol;
    ClosureReport rep;
    rep.n = n;
    rep.tol = tol;
    rep.residuals.assign(std::size_t(n) * n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::optional<Orbit>> cell(std::size_t(n) * n);

    int i0 = n / 2, j0 = n / 2;
    std::optional<Orbit> start_seed;
    if (b.closed_form) {
        try {
            start_seed = b.closed_form(patch.t1(i0, n), patch.t2(j0, n));
        } catch (const GeometryError&) {
        }
    }
    auto eval = [&](int i, int j, const Orbit* seed) -> const Orbit* {
        std::size_t idx = std::size_t(i) * n + j;
        try {
            Orbit o = extend_orbit(b, patch.t1(i, n), patch.t2(j, n), seed, opt);
            if (!o.degenerate) rep.residuals[idx] = o.closure_residual;
            cell[idx] = std::move(o);
            return &*cell[idx];
        } catch (const GeometryError&) {
            return nullptr;
        }
    };
    const Orbit* s0 = eval(i0, j0, start_seed ? &*start_seed : nullptr);
    auto sweep_row = [&](int i, const Orbit* s) {
        const Orbit* seed = s;
        for (int j = j0 + 1; j < n; ++j)
            if (const Orbit* o = eval(i, j, seed)) seed = o;
        seed = s;
        for (int j = j0 - 1; j >= 0; --j)
            if (const Orbit* o = eval(i, j, seed)) seed = o;
    };
    sweep_row(i0, s0);
    for (int j = 0; j < n; ++j) {
        const Orbit* base = cell[std::size_t(i0) * n + j] ? &*cell[std::size_t(i0) * n + j] : s0;
        const Orbit* seed = base;
        for (int i = i0 + 1; i < n; ++i)
            if (const Orbit* o = eval(i, j, seed)) seed = o;
        seed = base;
        for (int i = i0 - 1; i >= 0; --i)
            if (const Orbit* o = eval(i, j, seed)) seed = o;
    }

    int total = 0;
    for (double r : rep.residuals) {
        if (std::isnan(r)) {
            ++rep.degenerate_cells;
            continue;
        }
        ++total;
        rep.max_residual = std::max(rep.max_residual, r);
    }
    if (2 * rep.degenerate_cells > n * n)
        throw GeometryError(ErrorKind::PatchRejected, "more than half of the grid is degenerate");
    rep.fraction_closed = rep.fraction_at(tol);
    if (orbits_out) {
        orbits_out->clear();
        for (auto& c : cell)
            if (c) orbits_out->push_back(*c);
    }
    return rep;
}

// ---- builders ----

// (a, b, a, sigma_a(b)); the closed-form orbit is A, B, C = a meet reflect(AB at B), D = sigma_a(B).
inline Billiard build_type1(const ProjLine& a, const Mirror& b) {
    if (is_isotropic(a)) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic symmetry line");
    Mirror ma = Mirror::line(a);
    if (b.is_line() && is_isotropic(b.as_line())) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic mirror b");
    if (b.same_curve(ma)) throw GeometryError(ErrorKind::DegenerateInput, "neighbor mirrors on the same line");
    Billiard bl;
    bl.mirrors = {ma, b, ma, Mirror::image(b, a)};
    bl.closed_form = [bl_m = bl.mirrors, a](cplx t1, cplx t2) {
        Orbit o;
        Vec2c A = bl_m[0].point(t1), B = bl_m[1].point(t2);
        ProjLine out = detail::reflected_line(bl_m[1], A, B);
        Vec2c C = meet(out, a).xy();
        Vec2c D = symmetry_about_line(B, a);
        o.vertices = {{t1, A}, {t2, B}, {bl_m[2].param_of(C), C}, {t2, D}};
        return o;
    };
    return bl;
}

inline void check_distinct_lines(const std::vector<Mirror>& ms) {
    for (std::size_t j = 0; j < ms.size(); ++j) {
        if (is_isotropic(ms[j].as_line())) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic line");
        if (ms[j].same_curve(ms[(j + 1) % ms.size()]))
            throw GeometryError(ErrorKind::DegenerateInput, "neighbor mirrors coincide");
    }
}

// Lines a, b through a finite O at direction angles theta_a, theta_b; d = R_rho(a), c = R_rho(b).
inline Billiard build_type2(const Vec2c& O, cplx theta_a, cplx theta_b, cplx rho) {
    auto dir = [](cplx th) { return Vec2c(std::cos(th), std::sin(th)); };
    Billiard bl;
    Mirror a = Mirror::line(O, dir(theta_a)), b = Mirror::line(O, dir(theta_b));
    Mirror c = Mirror::line(O, dir(theta_b + rho)), d = Mirror::line(O, dir(theta_a + rho));
    bl.mirrors = {a, b, c, d};
    check_distinct_lines(bl.mirrors);
    if (a.same_curve(c) || b.same_curve(d)) throw GeometryError(ErrorKind::DegenerateInput, "opposite mirrors coincide");
    return bl;
}

// Translation case: four parallel lines with direction angle phi; a, b at normal offsets p_a, p_b,
// and (d, c) their translates by tau along the normal.
inline Billiard build_type2_translation(double phi, cplx p_a, cplx p_b, cplx tau) {
    Vec2c u(std::cos(phi), std::sin(phi)), nrm(-std::sin(phi), std::cos(phi));
    Billiard bl;
    bl.mirrors = {Mirror::line(p_a * nrm, u), Mirror::line(p_b * nrm, u), Mirror::line((p_b + tau) * nrm, u),
                  Mirror::line((p_a + tau) * nrm, u)};
    check_distinct_lines(bl.mirrors);
    return bl;
}

// Dispatch on O: finite gives a rotation, infinite gives a translation orthogonal to O's direction.
inline Billiard build_type2(const ProjPoint& O, cplx a_data, cplx b_data, cplx rho) {
    if (O.is_finite()) return build_type2(O.xy(), a_data, b_data, rho);
    Vec2c d(O.h(1), O.h(2));
    double phi = std::atan2(d(1).real(), d(0).real());
    return build_type2_translation(phi, a_data, b_data, rho);
}

enum class Topotype { Ellipses, Hyperbolas, EllipseHyperbola, Parabolas };

inline const char* to_string(Topotype t) {
    switch (t) {
    case Topotype::Ellipses: return "ellipses";
    case Topotype::Hyperbolas: return "hyperbolas";
    case Topotype::EllipseHyperbola: return "ellipse-hyperbola";
    case Topotype::Parabolas: return "parabolas";
    }
    return "unknown";
}

// (conic lambda1, conic lambda2, conic lambda1, conic lambda2). Real hyperbola members use the
// hyperbolic parameter on branch_1 / branch_2 so that real patches stay on the real trace.
inline Billiard build_type3(const ConfocalFamily& f, cplx lambda1, cplx lambda2, Topotype topo = Topotype::Ellipses,
                            int branch1 = 1, int branch2 = 1) {
    if (std::abs(lambda1 - lambda2) <= 1e-12 * (std::abs(lambda1) + std::abs(lambda2)))
        throw GeometryError(ErrorKind::DegenerateInput, "lambda1 = lambda2");
    double c2 = f.c * f.c;
    auto is_hyp = [&](cplx l) { return l.imag() == 0.0 && l.real() > 0.0 && l.real() < c2; };
    auto check = [&](bool want_hyp, cplx l) {
        if (is_hyp(l) != want_hyp)
            throw GeometryError(ErrorKind::DegenerateInput, std::string("member does not match topotype ") + to_string(topo));
    };
    switch (topo) {
    case Topotype::Ellipses:
        check(false, lambda1);
        check(false, lambda2);
        break;
    case Topotype::Hyperbolas:
        check(true, lambda1);
        check(true, lambda2);
        break;
    case Topotype::EllipseHyperbola:
        check(false, lambda1);
        check(true, lambda2);
        break;
    case Topotype::Parabolas: throw GeometryError(ErrorKind::DegenerateInput, "use build_type3_parabolic");
    }
    Mirror m1 = conic_at(f, lambda1, is_hyp(lambda1) ? branch1 : 0);
    Mirror m2 = conic_at(f, lambda2, is_hyp(lambda2) ? branch2 : 0);
    Billiard bl;
    bl.mirrors = {m1, m2, m1, m2};
    return bl;
}

// Confocal parabolas share focus (frame origin) and axis; f1 != f2 are focal parameters.
inline Billiard build_type3_parabolic(const Frame& frame, double f1, double f2) {
    if (f1 == f2) throw GeometryError(ErrorKind::DegenerateInput, "f1 = f2");
    Mirror m1 = Mirror::parabola(frame, f1), m2 = Mirror::parabola(frame, f2);
    Billiard bl;
    bl.mirrors = {m1, m2, m1, m2};
    return bl;
}

// ---- combinations ----

// (a_1..a_s, d_1..d_t, b_1..b_m, d_t..d_1, a_{s+1}..a_l)
inline Billiard combine(const Billiard& alpha, const Billiard& beta, std::size_t s, const std::vector<Mirror>& delta = {}) {
    if (s < 1 || s > alpha.size()) throw GeometryError(ErrorKind::DegenerateInput, "combination index out of range");
    for (const auto& d : delta)
        if (d.is_line() && is_isotropic(d.as_line())) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic added mirror");
    Billiard out;
    for (std::size_t j = 0; j < s; ++j) out.mirrors.push_back(alpha.mirrors[j]);
    for (const auto& d : delta) out.mirrors.push_back(d);
    for (const auto& m : beta.mirrors) out.mirrors.push_back(m);
    for (auto it = delta.rbegin(); it != delta.rend(); ++it) out.mirrors.push_back(*it);
    for (std::size_t j = s; j < alpha.size(); ++j) out.mirrors.push_back(alpha.mirrors[j]);
    return out;
}

// requires a_j = b_{m-j+1} for j = 1..s < min(l, m); returns (a_{s+1}..a_l, b_1..b_{m-s})
inline Billiard combine_erase(const Billiard& alpha, const Billiard& beta, std::size_t s) {
    std::size_t l = alpha.size(), m = beta.size();
    if (s < 1 || s >= std::min(l, m)) throw GeometryError(ErrorKind::DegenerateInput, "erasing index must satisfy 1 <= s < min(l, m)");
    for (std::size_t j = 0; j < s; ++j)
        if (!alpha.mirrors[j].same_curve(beta.mirrors[m - 1 - j]))
            throw GeometryError(ErrorKind::DegenerateInput, "erased mirrors differ");
    Billiard out;
    for (std::size_t j = s; j < l; ++j) out.mirrors.push_back(alpha.mirrors[j]);
    for (std::size_t j = 0; j < m - s; ++j) out.mirrors.push_back(beta.mirrors[j]);
    return out;
}

// cyclic shift by r and reversal, used by the relabeling properties
inline Billiard relabel(const Billiard& b, std::size_t r) {
    Billiard out;
    for (std::size_t j = 0; j < b.size(); ++j) out.mirrors.push_back(b.mirrors[(j + r) % b.size()]);
    return out;
}
inline Billiard reversed(const Billiard& b) {
    Billiard out;
    for (std::size_t j = 0; j < b.size(); ++j) out.mirrors.push_back(b.mirrors[(b.size() + 1 - j) % b.size()]);
    return out;
}

inline Billiard transformed(const Billiard& b, const Frame& g) {
    Billiard out;
    out.laws = b.laws;
    for (const auto& m : b.mirrors) out.mirrors.push_back(m.transformed(g));
    return out;
}

} // namespace cbill
