#pragma once

// Real pseudo-billiards: reflection laws, the billiard transformation of oriented lines,
// commuting bodies, orientation parity of composed reflections and ray tracing.

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbill/reflectivity.hpp"

namespace cbill {

using Vec2d = Eigen::Vector2d;
using LawType = Law;

inline double cross2(const Vec2d& a, const Vec2d& b) { return a(0) * b(1) - a(1) * b(0); }

inline double wrap_angle(double phi) {
    double r = std::fmod(phi, 2.0 * kPi);
    if (r < 0.0) r += 2.0 * kPi;
    if (r >= 2.0 * kPi) r = 0.0;
    return r;
}

// (-pi, pi]
inline double angle_difference(double a, double b) {
    double d = std::remainder(a - b, 2.0 * kPi);
    return d == -kPi ? kPi : d;
}

// Points x with n . x = p, n = (-sin phi, cos phi) the left normal of the direction (cos phi, sin phi).
struct OrientedLine {
    double phi = 0.0;
    double p = 0.0;

    OrientedLine() = default;
    OrientedLine(double phi_, double p_) : phi(wrap_angle(phi_)), p(p_) {}

    static OrientedLine through(const Vec2d& x, const Vec2d& d) {
        double n = d.norm();
        if (n == 0.0) throw GeometryError(ErrorKind::DegenerateInput, "zero direction");
        Vec2d u = d / n;
        return OrientedLine(std::atan2(u(1), u(0)), cross2(u, x));
    }

    Vec2d direction() const { return Vec2d(std::cos(phi), std::sin(phi)); }
    Vec2d normal() const { return Vec2d(-std::sin(phi), std::cos(phi)); }
    Vec2d point() const { return p * normal(); }
    OrientedLine reversed() const { return OrientedLine(phi + kPi, -p); }
    ProjLine projective() const {
        Vec2d n = normal();
        return ProjLine(-p, n(0), n(1));
    }
};

// Euclidean distance of (cos phi, sin phi, p).
inline double line_distance(const OrientedLine& a, const OrientedLine& b) {
    return std::sqrt((a.direction() - b.direction()).squaredNorm() + (a.p - b.p) * (a.p - b.p));
}

inline Vec2d reflect_across(const Vec2d& d, const Vec2d& tangent) {
    Vec2d t = tangent.normalized();
    return 2.0 * d.dot(t) * t - d;
}

// Law at B for the path A -> B -> C with symmetry line L through B.
inline LawType law_type(const Vec2d& A, const Vec2d& B, const Vec2d& C, const OrientedLine& L, double tol = 1e-9) {
    Vec2d t = L.direction(), n = L.normal();
    double sa = n.dot(A) - L.p, sc = n.dot(C) - L.p, sb = n.dot(B) - L.p;
    double scale = 1.0 + A.norm() + B.norm() + C.norm();
    if (std::abs(sb) > tol * scale) throw GeometryError(ErrorKind::DegenerateInput, "symmetry line does not pass through B");
    if (std::abs(sa) <= tol * scale || std::abs(sc) <= tol * scale)
        throw GeometryError(ErrorKind::DegenerateInput, "law undefined: A or C lies on the symmetry line");
    Vec2d ua = (A - B).normalized(), uc = (C - B).normalized();
    if (std::abs(cross2(reflect_across(ua, t), uc)) > tol)
        throw GeometryError(ErrorKind::NotAReflection, "lines BA and BC are not symmetric about L");
    return (sa > 0.0) == (sc > 0.0) ? Law::Usual : Law::Skew;
}

// Real trace of a mirror over a parameter interval, reflecting with a fixed law.
struct BodyArc {
    Mirror mirror;
    double t0 = 0.0, t1 = 0.0;
    Law law = Law::Usual;

    Vec2d point(double t) const { return mirror.point(t).real(); }
    Vec2d tangent(double t) const { return mirror.derivative(t).real(); }
    bool periodic() const {
        const Mirror& m = mirror.kind() == MirrorKind::Image ? mirror.base() : mirror;
        return m.kind() == MirrorKind::Circle || (m.kind() == MirrorKind::Confocal && m.branch() == 0);
    }
    bool closed() const { return periodic() && std::abs(t1 - t0 - 2.0 * kPi) < 1e-12; }
};

struct LineHit {
    double s;    // position along the oriented line, from its foot point
    Vec2d X;
    Vec2d T;     // mirror tangent at X
    std::size_t arc;
    double t;
};

namespace detail {

// Real intersections of an oriented line with one arc, Newton-polished on the arc parameter.
inline std::vector<LineHit> arc_hits(const BodyArc& a, std::size_t index, const OrientedLine& l) {
    std::vector<LineHit> out;
    Vec2d n = l.normal(), d = l.direction();
    IntersectionSet is;
    try {
        is = a.mirror.intersect(l.projective());
    } catch (const GeometryError&) {
        return out;  // line along a line mirror
    }
    double mid = 0.5 * (a.t0 + a.t1);
    for (const auto& h : is.points) {
        if (!h.point.is_finite(1e-12)) continue;
        Vec2c P = h.point.xy();
        double scale = 1.0 + P.norm();
        if (P.imag().norm() > 1e-6 * scale) continue;
        double t = a.mirror.param_of(P, mid).real();
        for (int it = 0; it < 8; ++it) {
            double f = n.dot(a.point(t)) - l.p, fp = n.dot(a.tangent(t));
            if (fp == 0.0) break;
            double dt = f / fp;
            t -= dt;
            if (std::abs(dt) < 1e-16 * (1.0 + std::abs(t))) break;
        }
        if (a.periodic()) t = a.t0 + std::fmod(std::fmod(t - a.t0, 2.0 * kPi) + 2.0 * kPi, 2.0 * kPi);
        double tol = 1e-12 * (1.0 + std::abs(t));
        if (t < a.t0 - tol || t > a.t1 + tol) continue;
        Vec2d X = a.point(t);
        if (std::abs(n.dot(X) - l.p) > 1e-9 * scale) continue;
        LineHit hit{d.dot(X), X, a.tangent(t), index, t};
        if (h.multiplicity > 1 || std::abs(cross2(d, hit.T.normalized())) < 1e-12)
            throw GeometryError(ErrorKind::Tangency, "oriented line is tangent to a boundary arc");
        out.push_back(hit);
    }
    return out;
}

inline Vec2d apply_law(const Vec2d& d, const Vec2d& T, Law law) {
    Vec2d r = reflect_across(d, T);
    return law == Law::Usual ? r : Vec2d(-r);
}

} // namespace detail

// Closed counterclockwise chain of arcs bounding a convex domain.
class ConvexBody {
public:
    explicit ConvexBody(std::vector<BodyArc> arcs, double tol = 1e-9) : arcs_(std::move(arcs)) {
        if (arcs_.empty()) throw GeometryError(ErrorKind::DegenerateInput, "body without arcs");
        for (std::size_t i = 0; i < arcs_.size(); ++i) {
            const BodyArc& a = arcs_[i];
            const BodyArc& b = arcs_[(i + 1) % arcs_.size()];
            if (a.mirror.point(a.t0).imag().norm() > tol || a.mirror.point(a.t1).imag().norm() > tol)
                throw GeometryError(ErrorKind::DegenerateInput, "arc is not real");
            if ((a.point(a.t1) - b.point(b.t0)).norm() > tol * (1.0 + a.point(a.t1).norm()))
                throw GeometryError(ErrorKind::DegenerateInput, "boundary arcs do not join");
            Vec2d ta = a.tangent(a.t1).normalized(), tb = b.tangent(b.t0).normalized();
            if (std::abs(cross2(ta, tb)) > 1e-9 || ta.dot(tb) < 0.0) corners_.push_back(b.point(b.t0));
        }
        sample_boundary();
        for (std::size_t i = 0; i < hull_.size(); ++i) {
            const Vec2d& p = hull_[i];
            const Vec2d& q = hull_[(i + 1) % hull_.size()];
            const Vec2d& r = hull_[(i + 2) % hull_.size()];
            if (cross2(q - p, r - q) < -tol * (1.0 + (q - p).squaredNorm()))
                throw GeometryError(ErrorKind::DegenerateInput, "boundary is not convex and counterclockwise");
        }
    }

    static ConvexBody ellipse(const ConfocalFamily& f, double lambda) {
        return ConvexBody({BodyArc{conic_at(f, lambda), 0.0, 2.0 * kPi}});
    }
    static ConvexBody disk(const Vec2d& center, double r) {
        return ConvexBody({BodyArc{Mirror::circle(center.cast<cplx>(), r * r), 0.0, 2.0 * kPi}});
    }

    const std::vector<BodyArc>& arcs() const { return arcs_; }
    const std::vector<Vec2d>& corners() const { return corners_; }
    const std::vector<Vec2d>& samples() const { return hull_; }

    bool contains(const Vec2d& x) const {
        for (std::size_t i = 0; i < hull_.size(); ++i) {
            const Vec2d& p = hull_[i];
            const Vec2d& q = hull_[(i + 1) % hull_.size()];
            if (cross2(q - p, x - p) < 0.0) return false;
        }
        return true;
    }

    double radius() const {
        double r = 0.0;
        for (const Vec2d& x : hull_) r = std::max(r, x.norm());
        return r;
    }

private:
    void sample_boundary() {
        const int per_arc = std::max(16, int(512 / arcs_.size()));
        for (const BodyArc& a : arcs_)
            for (int i = 0; i < per_arc; ++i) hull_.push_back(a.point(a.t0 + (a.t1 - a.t0) * i / per_arc));
    }

    std::vector<BodyArc> arcs_;
    std::vector<Vec2d> corners_;
    std::vector<Vec2d> hull_;
};

// All boundary hits of l, sorted along the orientation; junction duplicates merged.
inline std::vector<LineHit> line_hits(const std::vector<BodyArc>& arcs, const OrientedLine& l) {
    std::vector<LineHit> all;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        auto h = detail::arc_hits(arcs[i], i, l);
        all.insert(all.end(), h.begin(), h.end());
    }
    std::sort(all.begin(), all.end(), [](const LineHit& a, const LineHit& b) { return a.s < b.s; });
    std::vector<LineHit> out;
    for (const LineHit& h : all)
        if (out.empty() || (h.X - out.back().X).norm() > 1e-10 * (1.0 + h.X.norm())) out.push_back(h);
    return out;
}

// Reflection at the last boundary point along the orientation; identity on lines missing the body.
inline OrientedLine billiard_map(const ConvexBody& body, const OrientedLine& l) {
    auto hits = line_hits(body.arcs(), l);
    if (hits.empty()) return l;
    const LineHit& h = hits.back();
    for (const Vec2d& c : body.corners())
        for (const LineHit& x : hits)
            if ((x.X - c).norm() < 1e-9 * (1.0 + c.norm()))
                throw GeometryError(ErrorKind::CornerHit, "oriented line through a boundary corner");
    return OrientedLine::through(h.X, reflect_across(l.direction(), h.T));
}

// sup over samples of |s2 s1 (l) - s1 s2 (l)|; corner hits and tangencies are skipped.
inline double commute_residual(const ConvexBody& inner, const ConvexBody& outer, const std::vector<OrientedLine>& samples,
                               int* skipped = nullptr) {
    for (const Vec2d& x : inner.samples())
        if (!outer.contains(x)) throw GeometryError(ErrorKind::DegenerateInput, "bodies are not nested");
    double r = 0.0;
    int skip = 0;
    for (const OrientedLine& l : samples) {
        try {
            OrientedLine a = billiard_map(outer, billiard_map(inner, l));
            OrientedLine b = billiard_map(inner, billiard_map(outer, l));
            r = std::max(r, line_distance(a, b));
        } catch (const GeometryError& e) {
            if (e.kind() != ErrorKind::CornerHit && e.kind() != ErrorKind::Tangency) throw;
            ++skip;
        }
    }
    if (skipped) *skipped = skip;
    return r;
}

// Mirror germ at parameter t with its reflection law.
struct Reflector {
    Mirror mirror;
    double t;
    Law law;
};

// Composition of the reflections along the germs; each hit is the intersection nearest the germ point.
inline OrientedLine compose_reflections(const std::vector<Reflector>& rs, const OrientedLine& l) {
    OrientedLine cur = l;
    for (const Reflector& r : rs) {
        BodyArc whole{r.mirror, r.t - 1e6, r.t + 1e6, r.law};
        if (whole.periodic()) whole = BodyArc{r.mirror, r.t - kPi, r.t + kPi, r.law};
        Vec2d germ = whole.point(r.t);
        auto hits = detail::arc_hits(whole, 0, cur);
        if (hits.empty()) throw GeometryError(ErrorKind::ExtensionFailure, "oriented line misses a reflector");
        const LineHit* best = &hits[0];
        for (const LineHit& h : hits)
            if ((h.X - germ).norm() < (best->X - germ).norm()) best = &h;
        if (std::abs(cross2(cur.direction(), best->T.normalized())) < 1e-6)
            throw GeometryError(ErrorKind::Tangency, "near-tangential hit");
        cur = OrientedLine::through(best->X, detail::apply_law(cur.direction(), best->T, r.law));
    }
    return cur;
}

// Jacobian of the composed map on (phi, p) by central differences.
inline Eigen::Matrix2d composed_jacobian(const std::vector<Reflector>& rs, const OrientedLine& l, double h) {
    auto diff = [&](double dphi, double dp) {
        OrientedLine a = compose_reflections(rs, OrientedLine(l.phi + dphi, l.p + dp));
        OrientedLine b = compose_reflections(rs, OrientedLine(l.phi - dphi, l.p - dp));
        return Vec2d(angle_difference(a.phi, b.phi) / (2.0 * h), (a.p - b.p) / (2.0 * h));
    };
    Eigen::Matrix2d J;
    J.col(0) = diff(h, 0.0);
    J.col(1) = diff(0.0, h);
    return J;
}

// Sign of the Jacobian determinant. When the determinant is small against the entries (cancellation),
// the entries are Richardson-extrapolated from steps h and h/2.
inline int skew_parity_sign(const std::vector<Reflector>& rs, const OrientedLine& l, double h = 1e-6) {
    Eigen::Matrix2d J = composed_jacobian(rs, l, h);
    double d = J.determinant();
    if (std::abs(d) < 1e-4 * std::max(1.0, J.squaredNorm())) d = ((4.0 * composed_jacobian(rs, l, h / 2) - J) / 3.0).determinant();
    if (d == 0.0) throw GeometryError(ErrorKind::SingularState, "vanishing Jacobian");
    return d > 0.0 ? 1 : -1;
}

inline int expected_parity(const std::vector<Reflector>& rs) {
    int s = 1;
    for (const Reflector& r : rs)
        if (r.law == Law::Skew) s = -s;
    return s;
}

struct RayTrace {
    std::vector<std::pair<Vec2d, Vec2d>> segments;  // (start point, unit direction)
    int reflection_count = 0;
    OrientedLine exit_line;
    bool invisible = false;
    bool truncated = false;
    std::string diagnostic;
};

// Forward propagation from far behind the foot point of `entry`, reflecting with each arc's law.
inline RayTrace trace_ray(const std::vector<BodyArc>& arcs, const OrientedLine& entry, int max_reflections,
                          double tol = 1e-9) {
    double R = 10.0;
    for (const BodyArc& a : arcs)
        for (int i = 0; i <= 16; ++i) R = std::max(R, 2.0 * a.point(a.t0 + (a.t1 - a.t0) * i / 16).norm());
    RayTrace tr;
    Vec2d x = entry.point() - R * entry.direction(), d = entry.direction();
    tr.segments.push_back({x, d});
    OrientedLine cur = entry;
    try {
        while (true) {
            const LineHit* next = nullptr;
            auto hits = line_hits(arcs, cur);
            double s0 = cur.direction().dot(x);
            for (const LineHit& h : hits)
                if (h.s > s0 + 1e-9 * (1.0 + std::abs(s0))) {
                    next = &h;
                    break;
                }
            if (!next) break;
            if (tr.reflection_count == max_reflections) {
                tr.truncated = true;
                tr.diagnostic = "reflection budget exceeded";
                break;
            }
            d = detail::apply_law(d, next->T, arcs[next->arc].law);
            x = next->X;
            cur = OrientedLine::through(x, d);
            ++tr.reflection_count;
            tr.segments.push_back({x, d});
        }
    } catch (const GeometryError& e) {
        tr.truncated = true;
        tr.diagnostic = e.what();
    }
    tr.exit_line = cur;
    tr.invisible = !tr.truncated && line_distance(cur, entry) < tol;
    return tr;
}

inline RayTrace trace_ray(const ConvexBody& body, const OrientedLine& entry, int max_reflections, double tol = 1e-9) {
    return trace_ray(body.arcs(), entry, max_reflections, tol);
}

struct ScanWindow {
    double phi0, phi1, p0, p1;
};

struct ScanReport {
    int n = 0;
    int invisible = 0;
    int truncated = 0;
    double fraction_invisible = 0.0;
    double max_family_dimension_estimate = 0.0;
    std::vector<std::pair<int, int>> cells;  // grid indices with sub-tol return residual
};

// Box-counting slope of a set of grid cells over dyadic box sizes.
inline double box_counting_dimension(const std::vector<std::pair<int, int>>& cells, int n) {
    if (cells.size() < 2) return 0.0;
    std::vector<double> xs, ys;
    for (int b = 1; b <= n / 2; b *= 2) {
        std::set<std::pair<int, int>> boxes;
        for (auto [i, j] : cells) boxes.insert({i / b, j / b});
        xs.push_back(std::log(1.0 / b));
        ys.push_back(std::log(double(boxes.size())));
    }
    if (xs.size() < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= double(xs.size());
    my /= double(ys.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    return sxy / sxx;
}

// Rays on an n x n grid of the window that meet the arcs and return to their entry line.
inline ScanReport invisibility_scan(const std::vector<BodyArc>& arcs, const ScanWindow& w, int n, double tol = 1e-6,
                                    int max_reflections = 16) {
    if (n < 2) throw GeometryError(ErrorKind::DegenerateInput, "scan grid needs n >= 2");
    ScanReport r;
    r.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double phi = w.phi0 + (w.phi1 - w.phi0) * i / (n - 1);
            double p = w.p0 + (w.p1 - w.p0) * j / (n - 1);
            RayTrace t = trace_ray(arcs, OrientedLine(phi, p), max_reflections, tol);
            if (t.truncated) ++r.truncated;
            if (t.invisible && t.reflection_count > 0) {
                ++r.invisible;
                r.cells.push_back({i, j});
            }
        }
    r.fraction_invisible = double(r.invisible) / (double(n) * n);
    r.max_family_dimension_estimate = box_counting_dimension(r.cells, n);
    return r;
}

inline ScanReport invisibility_scan(const ConvexBody& body, const ScanWindow& w, int n, double tol = 1e-6) {
    return invisibility_scan(body.arcs(), w, n, tol);
}

// Two confocal parabola pairs symmetric under x -> -x. Rays parallel to the x-axis at heights in
// [0.4, 0.6] are compressed to half height by the left pair and restored by the right pair.
inline std::vector<BodyArc> parabolic_invisible_assembly(double d = 3.0) {
    Frame left{kPi / 2, -d, 0.0}, right{-kPi / 2, d, 0.0};
    return {BodyArc{Mirror::parabola(left, 1.0), 0.2, 0.3},
            BodyArc{Mirror::parabola(left, 0.5), 0.15, 0.35},
            BodyArc{Mirror::parabola(right, 0.5), -0.35, -0.15},
            BodyArc{Mirror::parabola(right, 1.0), -0.3, -0.2}};
}

inline OrientedLine parabolic_design_ray() { return OrientedLine(0.0, 0.5); }

struct LawAssembly {
    std::vector<BodyArc> arcs;
    OrientedLine entry;
};

// Arcs through the path entry -> B_1 -> ... -> B_k -> entry, tangent at B_j to the symmetry line
// realizing laws[j]; curvature 0 gives a line segment. Each arc has half arclength half_width.
inline LawAssembly law_pattern_assembly(const OrientedLine& entry, const std::vector<Vec2d>& B, const std::vector<Law>& laws,
                                        const std::vector<double>& curvature, double half_width) {
    std::size_t k = B.size();
    if (k == 0 || laws.size() != k || curvature.size() != k)
        throw GeometryError(ErrorKind::DegenerateInput, "assembly data sizes differ");
    LawAssembly out{{}, entry};
    for (std::size_t j = 0; j < k; ++j) {
        Vec2d din = j == 0 ? entry.direction() : Vec2d((B[j] - B[j - 1]).normalized());
        Vec2d dout = j + 1 == k ? entry.direction() : Vec2d((B[j + 1] - B[j]).normalized());
        Vec2d T = laws[j] == Law::Usual ? Vec2d(din + dout) : Vec2d(din - dout);
        if (T.norm() < 1e-9) throw GeometryError(ErrorKind::DegenerateInput, "path reverses at a vertex");
        T.normalize();
        Vec2d N(-T(1), T(0));
        if (curvature[j] == 0.0) {
            out.arcs.push_back({Mirror::line(B[j].cast<cplx>(), T.cast<cplx>()), -half_width, half_width, laws[j]});
            continue;
        }
        double r = 1.0 / std::abs(curvature[j]);
        Vec2d c = B[j] + (curvature[j] > 0 ? 1.0 : -1.0) * r * N;
        double tb = std::atan2(B[j](1) - c(1), B[j](0) - c(0));
        out.arcs.push_back({Mirror::circle(c.cast<cplx>(), r * r), tb - half_width / r, tb + half_width / r, laws[j]});
    }
    return out;
}

// Four circle arcs along a random quadrilateral path closing on the x-axis, with the skew law at
// two neighboring vertices (cyclically shifted by `shift`) and the usual law at the other two.
template <class Rng>
LawAssembly random_two_neighbor_skew_assembly(Rng& rng, int shift) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Law> laws{Law::Skew, Law::Skew, Law::Usual, Law::Usual};
    std::rotate(laws.begin(), laws.begin() + ((shift % 4) + 4) % 4, laws.end());
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double L = 2.0 + 2.0 * u(rng);
        double x2 = L * u(rng), y2 = 1.0 + u(rng), x3 = L * u(rng), y3 = -1.0 - u(rng);
        std::vector<Vec2d> B{Vec2d(0.0, 0.0), Vec2d(x2, y2), Vec2d(x3, y3), Vec2d(L, 0.0)};
        std::vector<double> kappa;
        for (int j = 0; j < 4; ++j) {
            double sign = u(rng) < 0.5 ? -1.0 : 1.0;
            kappa.push_back(sign * (0.2 + 0.8 * u(rng)));
        }
        LawAssembly a;
        try {
            a = law_pattern_assembly(OrientedLine(0.0, 0.0), B, laws, kappa, 0.3);
        } catch (const GeometryError&) {
            continue;
        }
        RayTrace t = trace_ray(a.arcs, a.entry, 8, 1e-9);
        if (t.invisible && t.reflection_count == 4) return a;
    }
    throw GeometryError(ErrorKind::ExtensionFailure, "no admissible random assembly");
}

} // namespace cbill
