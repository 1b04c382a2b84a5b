#pragma once

// JSON and CSV serialization of mirrors, billiards, bodies, framed polygons and reports.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cbill/birkhoff.hpp"
#include "cbill/real_billiards.hpp"
#include "cbill/triangular_fields.hpp"

namespace cbill::io {

using json = nlohmann::ordered_json;

[[noreturn]] inline void malformed(const std::string& what) { throw GeometryError(ErrorKind::Malformed, what); }

// complex numbers: a plain number when real, otherwise [re, im]
inline json to_json(cplx z) { return z.imag() == 0.0 ? json(z.real()) : json::array({z.real(), z.imag()}); }

inline cplx cplx_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    malformed("expected a number or [re, im], got " + j.dump());
}

inline json to_json(const Vec2c& v) { return json::array({to_json(v(0)), to_json(v(1))}); }
inline json to_json(const Vec3c& v) { return json::array({to_json(v(0)), to_json(v(1)), to_json(v(2))}); }

inline Vec2c vec2_from(const json& j) {
    if (!j.is_array() || j.size() != 2) malformed("expected a point [x, y], got " + j.dump());
    return {cplx_from(j[0]), cplx_from(j[1])};
}

inline Vec3c vec3_from(const json& j) {
    if (!j.is_array() || j.size() != 3) malformed("expected [c0, c1, c2], got " + j.dump());
    return {cplx_from(j[0]), cplx_from(j[1]), cplx_from(j[2])};
}

inline double real_from(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) malformed(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
    return j[key];
}

inline json to_json(const Frame& f) { return {{"angle", f.angle}, {"offset", json::array({f.ox, f.oy})}}; }

inline Frame frame_from(const json& j) {
    Frame f;
    if (j.is_null()) return f;
    f.angle = j.value("angle", 0.0);
    if (j.contains("offset")) {
        const json& o = j["offset"];
        if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) malformed("frame offset must be [x, y]");
        f.ox = o[0].get<double>();
        f.oy = o[1].get<double>();
    }
    return f;
}

inline json to_json(const Mirror& m) {
    json j;
    switch (m.kind()) {
    case MirrorKind::Line:
        j = {{"kind", "line"}, {"params", {{"point", to_json(m.anchor())}, {"direction", to_json(m.line_direction())}}}};
        break;
    case MirrorKind::Circle: j = {{"kind", "circle"}, {"params", {{"center", to_json(m.anchor())}, {"r2", to_json(m.value())}}}}; break;
    case MirrorKind::Confocal:
        j = {{"kind", "confocal"},
             {"params", {{"c", m.family().c}, {"lambda", to_json(m.value())}, {"branch", m.branch()}}},
             {"frame", to_json(m.frame())}};
        break;
    case MirrorKind::Parabola:
        j = {{"kind", "parabola"}, {"params", {{"f", m.value().real()}}}, {"frame", to_json(m.frame())}};
        break;
    case MirrorKind::Image:
        j = {{"kind", "image"}, {"params", {{"base", to_json(m.base())}, {"axis", to_json(m.axis().c)}}}};
        break;
    }
    return j;
}

inline Mirror mirror_from(const json& j) {
    std::string kind = field(j, "kind").is_string() ? j["kind"].get<std::string>() : "";
    const json& p = field(j, "params");
    Frame fr = j.contains("frame") ? frame_from(j["frame"]) : Frame{};
    if (kind == "line") return Mirror::line(vec2_from(field(p, "point")), vec2_from(field(p, "direction")));
    if (kind == "circle") return Mirror::circle(vec2_from(field(p, "center")), cplx_from(field(p, "r2")));
    if (kind == "confocal") return conic_at(ConfocalFamily(real_from(p, "c"), fr), cplx_from(field(p, "lambda")), p.value("branch", 0));
    if (kind == "parabola") return Mirror::parabola(fr, real_from(p, "f"));
    if (kind == "image") return Mirror::image(mirror_from(field(p, "base")), ProjLine(vec3_from(field(p, "axis"))));
    malformed("unknown mirror kind '" + kind + "'");
}

inline json to_json(const Billiard& b) {
    json j;
    j["mirrors"] = json::array();
    for (const Mirror& m : b.mirrors) j["mirrors"].push_back(to_json(m));
    if (!b.laws.empty()) {
        j["laws"] = json::array();
        for (Law l : b.laws) j["laws"].push_back(to_string(l));
    }
    return j;
}

inline Law law_from(const json& j) {
    if (j == "usual") return Law::Usual;
    if (j == "skew") return Law::Skew;
    malformed("law must be \"usual\" or \"skew\", got " + j.dump());
}

inline Billiard billiard_from(const json& j) {
    const json& ms = field(j, "mirrors");
    if (!ms.is_array()) malformed("'mirrors' must be an array");
    Billiard b;
    for (const json& m : ms) b.mirrors.push_back(mirror_from(m));
    if (j.contains("laws")) {
        if (!j["laws"].is_array()) malformed("'laws' must be an array");
        for (const json& l : j["laws"]) b.laws.push_back(law_from(l));
    }
    validate(b);
    return b;
}

inline json to_json(const Patch& p) {
    return json::array({to_json(p.t1_from), to_json(p.t1_to), to_json(p.t2_from), to_json(p.t2_to)});
}

inline Patch patch_from(const json& j) {
    if (!j.is_array() || j.size() != 4) malformed("patch must be [t1_from, t1_to, t2_from, t2_to]");
    return {cplx_from(j[0]), cplx_from(j[1]), cplx_from(j[2]), cplx_from(j[3])};
}

// "a,b,c,d" with real entries, or a JSON array
inline Patch patch_from_string(const std::string& s) {
    if (!s.empty() && s.front() == '[') return patch_from(json::parse(s, nullptr, false));
    std::string t = "[" + s + "]";
    json j = json::parse(t, nullptr, false);
    if (j.is_discarded()) malformed("cannot parse patch '" + s + "'");
    return patch_from(j);
}

inline json to_json(const ClosureReport& r) {
    return {{"grid", json::array({r.n, r.n})},
            {"tol", r.tol},
            {"fraction_closed", r.fraction_closed},
            {"max_residual", r.max_residual},
            {"degenerate_cells", r.degenerate_cells}};
}

inline json to_json(const BodyArc& a) {
    return {{"mirror", to_json(a.mirror)}, {"t_range", json::array({a.t0, a.t1})}, {"law", to_string(a.law)}};
}

inline BodyArc arc_from(const json& j) {
    const json& t = field(j, "t_range");
    if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) malformed("t_range must be [t0, t1]");
    BodyArc a{mirror_from(field(j, "mirror")), t[0].get<double>(), t[1].get<double>()};
    if (j.contains("law")) a.law = law_from(j["law"]);
    return a;
}

inline json to_json(const ConvexBody& b) {
    json arcs = json::array();
    for (const BodyArc& a : b.arcs()) arcs.push_back(to_json(a));
    return {{"arcs", arcs}, {"orientation", "ccw"}};
}

inline std::vector<BodyArc> arcs_from(const json& j) {
    const json& arcs = field(j, "arcs");
    if (!arcs.is_array()) malformed("'arcs' must be an array");
    std::vector<BodyArc> out;
    for (const json& a : arcs) out.push_back(arc_from(a));
    return out;
}

inline ConvexBody body_from(const json& j) {
    if (j.value("orientation", "ccw") != "ccw") malformed("bodies are counterclockwise");
    return ConvexBody(arcs_from(j));
}

inline json to_json(const OrientedLine& l) { return {{"phi", l.phi}, {"p", l.p}}; }

inline json to_json(const ScanReport& r) {
    return {{"grid", json::array({r.n, r.n})},
            {"fraction_invisible", r.fraction_invisible},
            {"invisible_cells", r.invisible},
            {"truncated_cells", r.truncated},
            {"max_family_dimension_estimate", r.max_family_dimension_estimate}};
}

inline json to_json(const RayTrace& t) {
    json segs = json::array();
    for (const auto& [x, d] : t.segments)
        segs.push_back({{"point", json::array({x(0), x(1)})}, {"direction", json::array({d(0), d(1)})}});
    return {{"segments", segs},
            {"reflection_count", t.reflection_count},
            {"exit_line", to_json(t.exit_line)},
            {"invisible", t.invisible},
            {"truncated", t.truncated}};
}

inline json to_json(const FramedKGon& g) {
    json v = json::array();
    for (const FramedVertex& x : g.vertices) v.push_back({{"A", to_json(x.A)}, {"L", to_json(x.L.c)}});
    return {{"vertices", v}};
}

inline FramedKGon framed_kgon_from(const json& j) {
    const json& vs = field(j, "vertices");
    if (!vs.is_array()) malformed("'vertices' must be an array");
    FramedKGon g;
    for (const json& v : vs) g.vertices.push_back({vec2_from(field(v, "A")), ProjLine(vec3_from(field(v, "L")))});
    return g;
}

inline json to_json(const DistributionReport& r) {
    json s = json::array();
    for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) s.push_back(r.singular_values(i));
    return {{"dimension", r.dimension}, {"singular", r.singular}, {"singular_values", s}};
}

inline json to_json(const IntegralPlane& P) {
    json rows = json::array();
    for (int i = 0; i < 2; ++i) {
        json r = json::array();
        for (int j = 0; j < 4; ++j) r.push_back(to_json(P.rows(i, j)));
        rows.push_back(r);
    }
    json l = json::array();
    for (const cplx& x : P.lengths) l.push_back(to_json(x));
    return {{"eta", to_json(P.eta)},
            {"eta_prime", to_json(P.eta_prime)},
            {"rows", rows},
            {"lengths", l},
            {"product_identity_residual", std::abs(P.product_identity_residual())}};
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// index, t_re, t_im, x_re, x_im, y_re, y_im, residual (residual of the reflection law at the vertex)
inline std::string orbit_csv(const Orbit& o) {
    std::ostringstream s;
    s << "index,t_re,t_im,x_re,x_im,y_re,y_im,residual\n";
    for (std::size_t j = 0; j < o.vertices.size(); ++j) {
        const auto& v = o.vertices[j];
        double r = j < o.verdicts.size() ? o.verdicts[j].residual : std::nan("");
        s << j << ',' << fmt17(v.t.real()) << ',' << fmt17(v.t.imag()) << ',' << fmt17(v.A(0).real()) << ','
          << fmt17(v.A(0).imag()) << ',' << fmt17(v.A(1).real()) << ',' << fmt17(v.A(1).imag()) << ',' << fmt17(r) << '\n';
    }
    return s.str();
}

inline std::string trajectory_csv(const SpiralTrajectory& tr) {
    std::ostringstream s;
    s << "step,B_x_re,B_x_im,B_y_re,B_y_im,C_x_re,C_x_im,C_y_re,C_y_im,P2_re,P2_im\n";
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const auto& st = tr.states[i];
        s << i;
        for (const Vec2c* v : {&st.B, &st.C})
            for (int c = 0; c < 2; ++c) s << ',' << fmt17((*v)(c).real()) << ',' << fmt17((*v)(c).imag());
        s << ',' << fmt17(tr.p2[i].real()) << ',' << fmt17(tr.p2[i].imag()) << '\n';
    }
    return s.str();
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) malformed("cannot open '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) malformed("'" + path + "' is not valid JSON");
    return j;
}

} // namespace cbill::io
