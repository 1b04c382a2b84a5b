#pragma once

// Parametrized mirrors: lines, circles, confocal conics, parabolas and mirror images.

#include <memory>
#include <optional>
#include <vector>

#include "cbill/projective.hpp"

namespace cbill {

// Rigid motion of the real plane, x -> R(angle) x + offset, extended to complex points.
struct Frame {
    double angle = 0.0;
    double ox = 0.0, oy = 0.0;

    Mat2c rot() const {
        Mat2c R;
        R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        return R;
    }
    Vec2c offset() const { return Vec2c(ox, oy); }
    Vec2c apply(const Vec2c& x) const { return rot() * x + offset(); }
    Vec2c apply_dir(const Vec2c& v) const { return rot() * v; }
    Vec2c inverse(const Vec2c& x) const { return rot().transpose() * (x - offset()); }

    // homogeneous point matrix and its inverse
    Mat3c matrix() const {
        Mat3c F = Mat3c::Zero();
        F(0, 0) = 1.0;
        F.block<2, 1>(1, 0) = offset();
        F.block<2, 2>(1, 1) = rot();
        return F;
    }
    Mat3c inverse_matrix() const {
        Mat3c F = Mat3c::Zero();
        F(0, 0) = 1.0;
        F.block<2, 1>(1, 0) = -(rot().transpose() * offset());
        F.block<2, 2>(1, 1) = rot().transpose();
        return F;
    }
    // this after inner
    Frame compose(const Frame& inner) const {
        Vec2c o = apply(inner.offset());
        return Frame{angle + inner.angle, o(0).real(), o(1).real()};
    }
    ProjLine apply(const ProjLine& l) const { return ProjLine(inverse_matrix().transpose() * l.c); }
};

struct ConfocalFamily {
    double c = 1.0;
    Frame frame;

    ConfocalFamily() = default;
    ConfocalFamily(double c_, Frame f = {}) : c(c_), frame(f) {
        if (!(c_ > 0.0)) throw GeometryError(ErrorKind::DegenerateInput, "confocal family needs c > 0");
    }
    std::pair<Vec2c, Vec2c> foci() const { return {frame.apply(Vec2c(-c, 0.0)), frame.apply(Vec2c(c, 0.0))}; }
};

enum class MirrorKind { Line, Circle, Confocal, Parabola, Image };

inline const char* to_string(MirrorKind k) {
    switch (k) {
    case MirrorKind::Line: return "line";
    case MirrorKind::Circle: return "circle";
    case MirrorKind::Confocal: return "confocal";
    case MirrorKind::Parabola: return "parabola";
    case MirrorKind::Image: return "image";
    }
    return "unknown";
}

struct IntersectionSet {
    struct Hit {
        ProjPoint point;
        int multiplicity = 1;
    };
    std::vector<Hit> points;

    std::vector<Vec2c> finite_points() const {
        std::vector<Vec2c> out;
        for (const auto& h : points)
            if (h.point.is_finite(1e-9)) out.push_back(h.point.xy());
        return out;
    }
};

namespace detail {

inline cplx shift_period(cplx t, cplx t_ref, cplx period) {
    double k = std::round(((t_ref - t) / period).real());
    return t + k * period;
}

// Roots of a s^2 + 2 b s + c = 0 in the pencil X0 + s X1, with s = inf meaning X1.
inline IntersectionSet pencil_roots(const Vec3c& X0, const Vec3c& X1, const Mat3c& Q) {
    cplx a = (X1.transpose() * Q * X1).value();
    cplx b = (X0.transpose() * Q * X1).value();
    cplx c = (X0.transpose() * Q * X0).value();
    double scale = std::abs(a) + std::abs(b) + std::abs(c);
    double qn = Q.cwiseAbs().maxCoeff();
    if (scale <= 1e-13 * qn) throw GeometryError(ErrorKind::DegenerateInput, "line contained in the conic");
    IntersectionSet out;
    cplx disc = b * b - a * c;
    bool double_root = std::abs(disc) <= 1e-12 * (std::norm(b) + std::abs(a * c));
    if (std::abs(a) <= 1e-14 * scale) {
        // the infinite point of the line lies on the conic
        if (std::abs(b) <= 1e-14 * scale) {
            out.points.push_back({ProjPoint(X1), 2});
            return out;
        }
        out.points.push_back({ProjPoint(X0 - c / (2.0 * b) * X1), 1});
        out.points.push_back({ProjPoint(X1), 1});
        return out;
    }
    if (double_root) {
        out.points.push_back({ProjPoint(X0 - b / a * X1), 2});
        return out;
    }
    cplx sq = std::sqrt(disc);
    cplx q = (std::abs(b + sq) >= std::abs(b - sq)) ? -(b + sq) : -(b - sq);
    out.points.push_back({ProjPoint(X0 + q / a * X1), 1});
    out.points.push_back({ProjPoint(X0 + c / q * X1), 1});
    return out;
}

} // namespace detail

class Mirror {
public:
    static Mirror line(const Vec2c& point, const Vec2c& dir) {
        if (is_isotropic_vector(dir)) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic line mirror");
        Mirror m(MirrorKind::Line);
        m.p0_ = point;
        m.d_ = dir;
        return m;
    }
    static Mirror line(const ProjLine& l) {
        if (is_isotropic(l)) throw GeometryError(ErrorKind::DegenerateMirror, "isotropic line mirror");
        cplx c1 = l.c(1), c2 = l.c(2);
        Vec2c p = std::abs(c1) >= std::abs(c2) ? Vec2c(-l.c(0) / c1, 0.0) : Vec2c(0.0, -l.c(0) / c2);
        Vec2c d = l.direction();
        return line(p, d / std::sqrt(bilinear_form(d, d)));
    }
    static Mirror circle(const Vec2c& center, cplx r2) {
        if (std::abs(r2) == 0.0) throw GeometryError(ErrorKind::DegenerateMirror, "zero radius circle");
        Mirror m(MirrorKind::Circle);
        m.p0_ = center;
        m.value_ = r2;
        return m;
    }
    // Member x^2/lambda + y^2/(lambda - c^2) = 1 of a confocal family. branch 0 uses the
    // trigonometric parameter; branch +1/-1 selects a real hyperbola branch with hyperbolic parameter.
    static Mirror confocal(const ConfocalFamily& f, cplx lambda, int branch = 0) {
        double c2 = f.c * f.c;
        if (std::abs(lambda) <= 1e-12 * c2 || std::abs(lambda - c2) <= 1e-12 * c2)
            throw GeometryError(ErrorKind::DegenerateInput, "degenerate member of the confocal family");
        if (branch != 0 && !(lambda.imag() == 0.0 && lambda.real() > 0.0 && lambda.real() < c2))
            throw GeometryError(ErrorKind::DegenerateInput, "hyperbola branch requires 0 < lambda < c^2");
        Mirror m(MirrorKind::Confocal);
        m.family_ = f;
        m.frame_ = f.frame;
        m.value_ = lambda;
        m.branch_ = branch;
        return m;
    }
    // x^2 = 4 f (y + f) in the frame: focus at the frame origin, axis along the frame's y direction.
    static Mirror parabola(const Frame& frame, double f) {
        if (f == 0.0) throw GeometryError(ErrorKind::DegenerateInput, "parabola with zero focal parameter");
        Mirror m(MirrorKind::Parabola);
        m.frame_ = frame;
        m.value_ = f;
        return m;
    }
    static Mirror image(const Mirror& base, const ProjLine& axis) {
        Mirror m(MirrorKind::Image);
        m.sym_ = symmetry_matrix(axis);
        m.axis_ = axis;
        m.base_ = std::make_shared<const Mirror>(base);
        return m;
    }

    MirrorKind kind() const { return kind_; }
    bool is_line() const { return kind_ == MirrorKind::Line || (kind_ == MirrorKind::Image && base_->is_line()); }
    const Frame& frame() const { return frame_; }
    const ConfocalFamily& family() const { return family_; }
    cplx value() const { return value_; }  // radius^2, lambda or focal parameter
    int branch() const { return branch_; }
    const Vec2c& anchor() const { return p0_; }  // line point or circle center
    const Vec2c& line_direction() const { return d_; }
    const Mirror& base() const { return *base_; }
    const ProjLine& axis() const { return axis_; }

    ProjLine as_line() const {
        if (kind_ == MirrorKind::Line) return ProjLine::through(p0_, d_);
        if (kind_ == MirrorKind::Image && base_->is_line()) return ProjLine(sym_.transpose() * base_->as_line().c);
        throw GeometryError(ErrorKind::DegenerateInput, "mirror is not a line");
    }

    Vec2c point(cplx t) const {
        switch (kind_) {
        case MirrorKind::Line: return p0_ + t * d_;
        case MirrorKind::Circle: return p0_ + std::sqrt(value_) * Vec2c(std::cos(t), std::sin(t));
        case MirrorKind::Confocal: return frame_.apply(local_confocal(t));
        case MirrorKind::Parabola: {
            double f = value_.real();
            return frame_.apply(Vec2c(2.0 * f * t, f * (t * t - 1.0)));
        }
        case MirrorKind::Image: return apply_sym(base_->point(t));
        }
        return {};
    }

    Vec2c derivative(cplx t) const {
        switch (kind_) {
        case MirrorKind::Line: return d_;
        case MirrorKind::Circle: return std::sqrt(value_) * Vec2c(-std::sin(t), std::cos(t));
        case MirrorKind::Confocal: {
            auto [a, b] = semi_axes();
            if (branch_ == 0) return frame_.apply_dir(Vec2c(-a * std::sin(t), b * std::cos(t)));
            cplx beta = hyperbolic_beta();
            return frame_.apply_dir(Vec2c(double(branch_) * a * std::sinh(t), beta * std::cosh(t)));
        }
        case MirrorKind::Parabola: {
            double f = value_.real();
            return frame_.apply_dir(Vec2c(2.0 * f, 2.0 * f * t));
        }
        case MirrorKind::Image: return sym_.block<2, 2>(1, 1) * base_->derivative(t);
        }
        return {};
    }

    ProjLine tangent_line(cplx t) const {
        Vec2c d = derivative(t);
        if (d.norm() <= 1e-14 * (1.0 + point(t).norm()))
            throw GeometryError(ErrorKind::DegenerateInput, "singular parameter");
        return ProjLine::through(point(t), d);
    }

    // homogeneous symmetric matrix of the conic in world coordinates
    Mat3c conic_matrix() const {
        switch (kind_) {
        case MirrorKind::Line: throw GeometryError(ErrorKind::DegenerateInput, "line mirror has no conic matrix");
        case MirrorKind::Circle: {
            Mat3c Q = Mat3c::Zero();
            cplx cx = p0_(0), cy = p0_(1);
            Q << cx * cx + cy * cy - value_, -cx, -cy, -cx, cplx(1.0), cplx(0.0), -cy, cplx(0.0), cplx(1.0);
            return Q;
        }
        case MirrorKind::Confocal: {
            double c2 = family_.c * family_.c;
            Mat3c Q = Mat3c::Zero();
            Q(0, 0) = -1.0;
            Q(1, 1) = 1.0 / value_;
            Q(2, 2) = 1.0 / (value_ - c2);
            Mat3c Fi = frame_.inverse_matrix();
            return Fi.transpose() * Q * Fi;
        }
        case MirrorKind::Parabola: {
            double f = value_.real();
            Mat3c Q = Mat3c::Zero();
            Q(0, 0) = -4.0 * f * f;
            Q(0, 2) = Q(2, 0) = -2.0 * f;
            Q(1, 1) = 1.0;
            Mat3c Fi = frame_.inverse_matrix();
            return Fi.transpose() * Q * Fi;
        }
        case MirrorKind::Image: return sym_.transpose() * base_->conic_matrix() * sym_;
        }
        return {};
    }

    ProjLine tangent_at_point(const Vec2c& P) const {
        if (is_line()) return as_line();
        Vec3c h(1.0, P(0), P(1));
        Vec3c c = conic_matrix() * h;
        if (std::abs(c(1)) + std::abs(c(2)) <= 1e-14 * c.norm())
            throw GeometryError(ErrorKind::DegenerateInput, "polar of a singular point");
        return ProjLine(c);
    }

    IntersectionSet intersect(const ProjLine& l) const {
        if (is_line()) {
            ProjLine m = as_line();
            if (proj_equal(m, l, 1e-13)) throw GeometryError(ErrorKind::DegenerateInput, "line coincides with the mirror");
            IntersectionSet out;
            out.points.push_back({meet(m, l), 1});
            return out;
        }
        Vec3c X0, X1;
        cplx c1 = l.c(1), c2 = l.c(2);
        if (std::norm(c1) + std::norm(c2) <= 1e-24 * l.c.squaredNorm()) {
            X0 = Vec3c(0.0, 1.0, 0.0);
            X1 = Vec3c(0.0, 0.0, 1.0);
        } else {
            Vec2c p = std::abs(c1) >= std::abs(c2) ? Vec2c(-l.c(0) / c1, 0.0) : Vec2c(0.0, -l.c(0) / c2);
            X0 = Vec3c(1.0, p(0), p(1));
            X1 = Vec3c(0.0, -c2, c1);
            X0 /= X0.norm();
            X1 /= X1.norm();
        }
        Mat3c Q = conic_matrix();
        Q /= Q.cwiseAbs().maxCoeff();
        return detail::pencil_roots(X0, X1, Q);
    }

    // Parameter of a point on the mirror; periodic ambiguities are resolved towards t_ref.
    cplx param_of(const Vec2c& P, cplx t_ref = 0.0) const {
        switch (kind_) {
        case MirrorKind::Line: return bilinear_form(P - p0_, d_) / bilinear_form(d_, d_);
        case MirrorKind::Circle: {
            Vec2c u = (P - p0_) / std::sqrt(value_);
            return detail::shift_period(-kI * std::log(u(0) + kI * u(1)), t_ref, 2.0 * kPi);
        }
        case MirrorKind::Confocal: {
            Vec2c x = frame_.inverse(P);
            auto [a, b] = semi_axes();
            if (branch_ == 0) return detail::shift_period(-kI * std::log(x(0) / a + kI * x(1) / b), t_ref, 2.0 * kPi);
            cplx beta = hyperbolic_beta();
            cplx u = std::asinh(x(1) / beta);
            cplx best = u;
            double err = 1e300;
            for (cplx cand : {u, kI * kPi - u}) {
                cand = detail::shift_period(cand, t_ref, 2.0 * kPi * kI);
                double e = (point(cand) - P).norm();
                if (e < err) {
                    err = e;
                    best = cand;
                }
            }
            return best;
        }
        case MirrorKind::Parabola: return frame_.inverse(P)(0) / (2.0 * value_.real());
        case MirrorKind::Image: return base_->param_of(apply_sym(P), t_ref);
        }
        return 0.0;
    }

    Mirror transformed(const Frame& g) const {
        Mirror m = *this;
        switch (kind_) {
        case MirrorKind::Line:
            m.p0_ = g.apply(p0_);
            m.d_ = g.apply_dir(d_);
            break;
        case MirrorKind::Circle: m.p0_ = g.apply(p0_); break;
        case MirrorKind::Confocal:
            m.family_.frame = g.compose(family_.frame);
            m.frame_ = m.family_.frame;
            break;
        case MirrorKind::Parabola: m.frame_ = g.compose(frame_); break;
        case MirrorKind::Image: return image(base_->transformed(g), g.apply(axis_));
        }
        return m;
    }

    // same point set (projective equality of lines or of conic matrices)
    bool same_curve(const Mirror& o, double tol = 1e-10) const {
        if (is_line() != o.is_line()) return false;
        if (is_line()) return proj_equal(as_line(), o.as_line(), tol);
        Mat3c A = conic_matrix(), B = o.conic_matrix();
        Eigen::Index i, j;
        A.cwiseAbs().maxCoeff(&i, &j);
        if (std::abs(B(i, j)) == 0.0) return false;
        A /= A(i, j);
        B /= B(i, j);
        return (A - B).norm() < tol * A.norm();
    }

    // semi-axes (a, b) of a confocal member: a = sqrt(lambda), b = sqrt(lambda - c^2)
    std::pair<cplx, cplx> semi_axes() const {
        double c2 = family_.c * family_.c;
        return {std::sqrt(value_), std::sqrt(value_ - c2)};
    }

private:
    explicit Mirror(MirrorKind k) : kind_(k) {}

    cplx hyperbolic_beta() const { return std::sqrt(family_.c * family_.c - value_); }

    Vec2c local_confocal(cplx t) const {
        auto [a, b] = semi_axes();
        if (branch_ == 0) return Vec2c(a * std::cos(t), b * std::sin(t));
        return Vec2c(double(branch_) * a * std::cosh(t), hyperbolic_beta() * std::sinh(t));
    }

    Vec2c apply_sym(const Vec2c& x) const {
        Vec3c h = sym_ * Vec3c(1.0, x(0), x(1));
        return Vec2c(h(1) / h(0), h(2) / h(0));
    }

    MirrorKind kind_;
    Vec2c p0_ = Vec2c::Zero();
    Vec2c d_ = Vec2c(1.0, 0.0);
    cplx value_ = 0.0;
    int branch_ = 0;
    Frame frame_;
    ConfocalFamily family_;
    Mat3c sym_ = Mat3c::Identity();
    ProjLine axis_;
    std::shared_ptr<const Mirror> base_;
};

inline Mirror conic_at(const ConfocalFamily& f, cplx lambda, int branch = 0) { return Mirror::confocal(f, lambda, branch); }

inline ProjLine tangent_line(const Mirror& m, cplx t) { return m.tangent_line(t); }

inline IntersectionSet intersect_line_mirror(const ProjLine& l, const Mirror& m) { return m.intersect(l); }

} // namespace cbill
