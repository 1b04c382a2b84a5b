#pragma once

// Deterministic SVG figures: billiards with orbit families, spiral trajectories and ray traces.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cbill/real_billiards.hpp"
#include "cbill/triangular_fields.hpp"

namespace cbill::svg {

struct ViewBox {
    double xmin = -4, xmax = 4, ymin = -4, ymax = 4;

    bool contains(const Vec2d& p) const { return p(0) >= xmin && p(0) <= xmax && p(1) >= ymin && p(1) <= ymax; }
};

inline ViewBox bounding(const std::vector<Vec2d>& pts, double margin = 0.1) {
    if (pts.empty()) return {};
    ViewBox v{pts[0](0), pts[0](0), pts[0](1), pts[0](1)};
    for (const Vec2d& p : pts) {
        v.xmin = std::min(v.xmin, p(0));
        v.xmax = std::max(v.xmax, p(0));
        v.ymin = std::min(v.ymin, p(1));
        v.ymax = std::max(v.ymax, p(1));
    }
    double m = margin * std::max({v.xmax - v.xmin, v.ymax - v.ymin, 1e-9});
    return {v.xmin - m, v.xmax + m, v.ymin - m, v.ymax + m};
}

class Document {
public:
    explicit Document(ViewBox box, double width = 600.0) : box_(box), width_(width) {
        height_ = width * (box.ymax - box.ymin) / (box.xmax - box.xmin);
    }

    void polyline(const std::vector<Vec2d>& pts, const std::string& stroke, double stroke_width = 1.0,
                  const std::string& extra = "") {
        if (pts.size() < 2) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width) << "\"" << extra
              << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(sx(pts[i](0))) << ',' << num(sy(pts[i](1)));
        body_ << "\"/>\n";
    }

    void circle(const Vec2d& c, double r_px, const std::string& fill) {
        body_ << "<circle cx=\"" << num(sx(c(0))) << "\" cy=\"" << num(sy(c(1))) << "\" r=\"" << num(r_px) << "\" fill=\""
              << fill << "\"/>\n";
    }

    void text(const Vec2d& at, const std::string& s) {
        body_ << "<text x=\"" << num(sx(at(0))) << "\" y=\"" << num(sy(at(1))) << "\" font-size=\"12\">" << s << "</text>\n";
    }

    std::string str() const {
        std::ostringstream o;
        o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
          << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << body_.str() << "</svg>\n";
        return o.str();
    }

    const ViewBox& box() const { return box_; }

private:
    static std::string num(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", x);
        return buf;
    }
    double sx(double x) const { return (x - box_.xmin) / (box_.xmax - box_.xmin) * width_; }
    double sy(double y) const { return (box_.ymax - y) / (box_.ymax - box_.ymin) * height_; }

    ViewBox box_;
    double width_, height_;
    std::ostringstream body_;
};

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

// Real points of a mirror, split into connected pieces inside the box.
inline std::vector<std::vector<Vec2d>> mirror_trace(const Mirror& m, const ViewBox& box, int samples = 400) {
    const Mirror& base = m.kind() == MirrorKind::Image ? m.base() : m;
    double t0 = -3.0, t1 = 3.0;
    double span = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
    if (base.kind() == MirrorKind::Circle || (base.kind() == MirrorKind::Confocal && base.branch() == 0)) {
        t0 = 0.0;
        t1 = 2.0 * kPi;
    } else if (base.kind() == MirrorKind::Line) {
        double c = base.param_of(Vec2c(0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax))).real();
        t0 = c - 2.0 * span;
        t1 = c + 2.0 * span;
    } else if (base.kind() == MirrorKind::Parabola) {
        t0 = -span;
        t1 = span;
    }
    std::vector<std::vector<Vec2d>> pieces(1);
    for (int i = 0; i <= samples; ++i) {
        Vec2c P = m.point(t0 + (t1 - t0) * i / samples);
        bool ok = P.imag().norm() < 1e-9 * (1.0 + P.norm()) && box.contains(P.real());
        if (ok)
            pieces.back().push_back(P.real());
        else if (!pieces.back().empty())
            pieces.emplace_back();
    }
    if (pieces.back().empty()) pieces.pop_back();
    return pieces;
}

inline bool is_real_orbit(const Orbit& o, double tol = 1e-9) {
    for (const auto& v : o.vertices)
        if (v.A.imag().norm() > tol * (1.0 + v.A.norm())) return false;
    return true;
}

// Mirrors in gray-to-color, each real orbit as a closed polygon.
inline std::string billiard_figure(const Billiard& b, const std::vector<Orbit>& orbits, ViewBox box) {
    Document d(box);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (const auto& piece : mirror_trace(b.mirrors[i], box)) d.polyline(piece, palette(i), 2.0);
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        if (!is_real_orbit(orbits[k])) continue;
        std::vector<Vec2d> pts;
        for (const auto& v : orbits[k].vertices) pts.push_back(v.A.real());
        pts.push_back(pts.front());
        d.polyline(pts, "#444444", 0.6, " stroke-opacity=\"0.7\"");
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) d.circle(pts[j], 1.5, "#000000");
    }
    return d.str();
}

// Real parts of the B and C curves, with the fixed vertex A.
inline std::string spiral_figure(const SpiralTrajectory& tr) {
    std::vector<Vec2d> b, c, all;
    for (const auto& s : tr.states) {
        b.push_back(s.B.real());
        c.push_back(s.C.real());
    }
    all = b;
    all.insert(all.end(), c.begin(), c.end());
    if (!tr.states.empty()) all.push_back(tr.states[0].A.real());
    Document d(bounding(all));
    d.polyline(b, palette(0), 1.2);
    d.polyline(c, palette(1), 1.2);
    if (!tr.states.empty()) {
        const auto& s0 = tr.states.front();
        d.polyline({s0.A.real(), s0.B.real(), s0.C.real(), s0.A.real()}, "#888888", 0.8);
        d.circle(s0.A.real(), 3.0, "#000000");
    }
    return d.str();
}

// Arcs and ray polylines; the last segment of each trace is extended by `tail`.
inline std::string trace_figure(const std::vector<BodyArc>& arcs, const std::vector<RayTrace>& traces, ViewBox box,
                                double tail = 3.0) {
    Document d(box);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const BodyArc& a = arcs[i];
        std::vector<Vec2d> pts;
        for (int k = 0; k <= 200; ++k) pts.push_back(a.point(a.t0 + (a.t1 - a.t0) * k / 200));
        d.polyline(pts, a.law == Law::Usual ? "#1f77b4" : "#d62728", 2.5);
    }
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const RayTrace& t = traces[k];
        std::vector<Vec2d> pts;
        for (const auto& seg : t.segments) pts.push_back(seg.first);
        if (!t.segments.empty()) pts.push_back(t.segments.back().first + tail * t.segments.back().second);
        d.polyline(pts, t.invisible ? "#2ca02c" : "#7f7f7f", 0.8);
    }
    return d.str();
}

} // namespace cbill::svg
