#pragma once

// Named billiards with default verification patches.

#include <map>
#include <string>
#include <vector>

#include "cbill/reflectivity.hpp"

namespace cbill {

struct BuiltinBilliard {
    std::string name;
    Billiard billiard;
    Patch patch;
};

struct BuiltinOptions {
    double foci = 1.0;                       // half focal distance c
    std::vector<double> lambdas = {4.0, 2.0};
    int variant = 0;
};

inline BuiltinBilliard type3_variant(Topotype topo, int variant, double c = 1.0) {
    ConfocalFamily f(c);
    switch (topo) {
    case Topotype::Ellipses: return {"type3-ellipses", build_type3(f, 4.0, 2.0), Patch{0.2, 1.2, 1.8, 2.8}};
    case Topotype::Hyperbolas:
        if (variant == 0)
            return {"type3-hyperbolas-0", build_type3(f, 0.3, 0.7, topo, 1, -1), Patch{-0.5, 0.5, -0.8, 0.2}};
        if (variant == 1)
            return {"type3-hyperbolas-1", build_type3(f, 0.3, 0.7, topo, 1, 1),
                    Patch{cplx(-0.5, 0.1), cplx(0.5, 0.1), cplx(-0.8, -0.05), cplx(0.2, -0.05)}};
        return {"type3-hyperbolas-2", build_type3(f, 0.3, 0.7, topo, -1, 1), Patch{-0.5, 0.5, -0.8, 0.2}};
    case Topotype::EllipseHyperbola:
        if (variant == 0)
            return {"type3-ellipse-hyperbola-0", build_type3(f, 4.0, 0.5, topo, 1, 1), Patch{0.2, 1.2, -0.5, 0.5}};
        return {"type3-ellipse-hyperbola-1", build_type3(f, 4.0, 0.5, topo, 1, -1), Patch{0.2, 1.2, -0.5, 0.5}};
    case Topotype::Parabolas:
        return {"type3-parabolas", build_type3_parabolic(Frame{}, 1.0, 0.5), Patch{-0.5, 0.0, 1.0, 1.5}};
    }
    throw GeometryError(ErrorKind::DegenerateInput, "unknown topotype");
}

// outer ellipse x^2/4 + y^2/3 with inner x^2/2.01 + y^2/1: the inner focus moves off (1, 0)
inline Billiard nonconfocal_control() {
    ConfocalFamily f(1.0), g(std::sqrt(1.01));
    Mirror a = conic_at(f, 4.0), b = conic_at(g, 2.01);
    Billiard bl;
    bl.mirrors = {a, b, a, b};
    return bl;
}

inline std::vector<std::string> builtin_names() {
    return {"type1", "type1-circle", "type2", "type2-translation", "type3", "type3-hyperbolas", "type3-ellipse-hyperbola",
            "type3-parabolas", "nonconfocal", "triangle-conics", "alpha3", "six-conics"};
}

inline BuiltinBilliard make_builtin(const std::string& name, const BuiltinOptions& opt = {}) {
    ProjLine xaxis(0.0, 0.0, 1.0);
    if (name == "type1")
        return {name, build_type1(xaxis, Mirror::parabola(Frame{0.0, 0.0, 1.25}, 0.25)), Patch{-1.0, 1.0, -0.5, 0.5}};
    if (name == "type1-circle")
        return {name, build_type1(xaxis, Mirror::circle(Vec2c(0.0, 0.0), 1.0)), Patch{-0.5, 0.5, 0.5, 2.5}};
    if (name == "type2") return {name, build_type2(Vec2c(0.0, 0.0), 0.0, kPi / 3, kPi / 5), Patch{0.5, 2.0, 0.5, 2.0}};
    if (name == "type2-translation")
        return {name, build_type2(ProjPoint(0.0, 1.0, 0.0), 0.0, 1.0, -2.5), Patch{-1.0, 1.0, -1.0, 1.0}};
    if (name == "type3") {
        if (opt.lambdas.size() != 2) throw GeometryError(ErrorKind::Malformed, "type3 needs two lambdas");
        ConfocalFamily f(opt.foci);
        double c2 = opt.foci * opt.foci;
        double l1 = opt.lambdas[0], l2 = opt.lambdas[1];
        bool h1 = l1 < c2, h2 = l2 < c2;
        Topotype topo = !h1 && !h2 ? Topotype::Ellipses : (h1 && h2 ? Topotype::Hyperbolas : Topotype::EllipseHyperbola);
        if (h1 && !h2) std::swap(l1, l2);
        BuiltinBilliard b{name, build_type3(f, l1, l2, topo, 1, -1), Patch{0.2, 1.2, 1.8, 2.8}};
        if (topo == Topotype::Hyperbolas) b.patch = Patch{-0.5, 0.5, -0.8, 0.2};
        if (topo == Topotype::EllipseHyperbola) b.patch = Patch{0.2, 1.2, -0.5, 0.5};
        return b;
    }
    if (name == "type3-hyperbolas") return type3_variant(Topotype::Hyperbolas, opt.variant);
    if (name == "type3-ellipse-hyperbola") return type3_variant(Topotype::EllipseHyperbola, opt.variant);
    if (name == "type3-parabolas") return type3_variant(Topotype::Parabolas, 0);
    if (name == "nonconfocal") return {name, nonconfocal_control(), Patch{0.2, 1.2, 1.8, 2.8}};
    if (name == "triangle-conics") {
        ConfocalFamily f(1.0, Frame{0.3, 0.2, -0.1});
        Billiard bl;
        bl.mirrors = {conic_at(f, 4.0), Mirror::circle(Vec2c(0.5, 0.3), 2.5), Mirror::line(Vec2c(0.0, -1.5), Vec2c(1.0, 0.2))};
        return {name, bl, Patch{0.2, 1.2, 1.8, 2.8}};
    }
    if (name == "alpha3") {
        // erase((a, b1, a, b1*), (b2*, a, b2, a), 1) = (b1, a, b1*, b2*, a, b2)
        Mirror b1 = Mirror::parabola(Frame{0.0, 0.0, 1.25}, 0.25);
        Mirror b2 = Mirror::circle(Vec2c(0.3, 1.5), 1.0);
        Billiard al = build_type1(xaxis, b1);
        Billiard be = relabel(build_type1(xaxis, b2), 3);
        return {name, combine_erase(al, be, 1), Patch{-0.5, 0.5, -1.0, 1.0}};
    }
    if (name == "six-conics") {
        // erase((a, b, a, b), (c, a, c, a), 1) = (b, a, b, c, a, c) on one confocal family
        ConfocalFamily f(1.0);
        Billiard al = build_type3(f, 4.0, 2.0), be = build_type3(f, 6.0, 4.0);
        return {name, combine_erase(al, be, 1), Patch{cplx(1.8, 0.1), cplx(2.8, 0.1), cplx(0.2, -0.05), cplx(1.2, -0.05)}};
    }
    throw GeometryError(ErrorKind::Malformed, "unknown builtin '" + name + "'");
}

} // namespace cbill
