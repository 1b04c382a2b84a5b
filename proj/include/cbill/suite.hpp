#pragma once

// The acceptance battery: one JSON object per criterion with verdict, measured values and thresholds.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cbill/builtins.hpp"
#include "cbill/io.hpp"
#include "cbill/sampling.hpp"

namespace cbill::suite {

using io::json;
using sampling::Rng;
using sampling::uniform;

struct Criterion {
    int id;
    std::string name;
    std::string module;
    std::function<json(Rng&)> run;  // returns {"pass": bool, "measured": {...}, "thresholds": {...}}
};

// builtins of type 1, 2 and 3 used as positive controls
inline std::vector<BuiltinBilliard> positive_controls() {
    std::vector<BuiltinBilliard> out;
    for (const char* n : {"type1", "type1-circle", "type2", "type2-translation", "type3", "type3-parabolas"})
        out.push_back(make_builtin(n));
    for (int v = 0; v < 3; ++v) out.push_back(type3_variant(Topotype::Hyperbolas, v));
    for (int v = 0; v < 2; ++v) out.push_back(type3_variant(Topotype::EllipseHyperbola, v));
    return out;
}

inline json reflection_oracle(Rng& rng) {
    double worst = 0.0;
    int cases = 0;
    while (cases < 10000) {
        Vec2c x = sampling::gaussian_vec(rng), m = sampling::gaussian_vec(rng);
        if (is_isotropic_vector(x, 1e-6) || is_isotropic_vector(m, 1e-6)) continue;
        DirectionCoord got = reflect_direction(DirectionCoord::of_vector(x), DirectionCoord::of_vector(m));
        Vec2c want = 2.0 * bilinear_form(x, m) / bilinear_form(m, m) * m - x;
        worst = std::max(worst, chordal_distance(got, DirectionCoord::of_vector(want)));
        ++cases;
    }
    return {{"pass", worst < 1e-12}, {"measured", {{"cases", cases}, {"max_chordal_distance", worst}}}, {"thresholds", {{"max_chordal_distance", 1e-12}}}};
}

inline json positive_families(Rng&) {
    json per = json::object();
    bool ok = true;
    for (const auto& b : positive_controls()) {
        ClosureReport r = verify_k_reflectivity(b.billiard, b.patch, 24, 1e-9);
        per[b.name] = io::to_json(r);
        ok = ok && r.fraction_closed >= 0.99;
    }
    return {{"pass", ok}, {"measured", per}, {"thresholds", {{"fraction_closed_min", 0.99}, {"tol", 1e-9}, {"grid", 24}}}};
}

inline json negative_controls(Rng& rng) {
    auto b = make_builtin("nonconfocal");
    ClosureReport r = verify_k_reflectivity(b.billiard, b.patch, 24, 1e-9);
    double worst = 0.0;
    int tested = 0, rejected = 0;
    for (int n = 0; n < 100; ++n) {
        Billiard t;
        for (int j = 0; j < 3; ++j) t.mirrors.push_back(sampling::random_mirror(rng));
        try {
            worst = std::max(worst, verify_k_reflectivity(t, Patch{0.2, 1.2, 1.8, 2.8}, 8, 1e-6).fraction_closed);
            ++tested;
        } catch (const GeometryError& e) {
            if (e.kind() != ErrorKind::PatchRejected) throw;
            ++rejected;
        }
    }
    bool pass = r.fraction_closed < 0.05 && worst < 0.01 && tested >= 95;
    return {{"pass", pass},
            {"measured",
             {{"nonconfocal", io::to_json(r)}, {"triples_tested", tested}, {"triples_patch_rejected", rejected}, {"triples_max_fraction_closed", worst}}},
            {"thresholds", {{"nonconfocal_fraction_max", 0.05}, {"triples_fraction_max", 0.01}, {"triples_tol", 1e-6}}}};
}

inline json first_integral(Rng& rng) {
    int done = 0, draws = 0;
    double worst = 0.0;
    while (done < 20 && draws < 60) {
        auto s = sampling::random_spiral_start(rng, draws % 2 == 0, draws % 4 < 2);
        ++draws;
        auto tr = integrate_spiral(s, 1000, 1e-3);
        worst = std::max(worst, tr.max_relative_drift());
        if (!tr.truncated) ++done;
    }
    Vec2c A(0.0, 0.0), B(0.6, 0.8);
    auto c = integrate_spiral(frame_triangle(A, -Mat2c::Identity(), B, -B, Vec2c(-0.8, 0.6), Vec2c(0.8, -0.6)), 1000, 1e-3);
    double circle = c.truncated ? 1.0 : c.max_relative_drift();
    return {{"pass", done == 20 && worst < 1e-8 && circle < 1e-12},
            {"measured", {{"completed_starts", done}, {"draws", draws}, {"max_relative_drift", worst}, {"circle_drift", circle}}},
            {"thresholds", {{"max_relative_drift", 1e-8}, {"circle_drift", 1e-12}, {"steps", 1000}}}};
}

inline json skew_parity(Rng& rng) {
    int agree = 0;
    for (int n = 0; n < 100; ++n) {
        double phi = uniform(rng, 0, 2 * kPi);
        OrientedLine l(phi, uniform(rng, -1, 1));
        auto laws = sampling::random_laws(rng, 2 + n % 4);
        auto chain = sampling::random_reflector_chain(rng, l, laws);
        if (skew_parity_sign(chain, l) == expected_parity(chain)) ++agree;
    }
    return {{"pass", agree == 100}, {"measured", {{"configurations", 100}, {"agreeing", agree}}}, {"thresholds", {{"agreeing", 100}}}};
}

inline json concordance(Rng& rng) {
    int tested = 0, matched = 0;
    for (int n = 0; n < 1000; ++n) {
        std::vector<int> alpha;
        int prod = 1;
        for (int j = 0; j < 4; ++j) {
            alpha.push_back(rng() % 2 ? 1 : -1);
            prod *= alpha.back();
        }
        FramedKGon g;
        try {
            g = frame_real_kgon(sampling::random_real_points(rng, 4), alpha);
        } catch (const GeometryError&) {
            continue;
        }
        ++tested;
        if (concordant_lengths(g).has_value() == (prod == 1)) ++matched;
    }
    int sign_ok = 0, quads = 0;
    double min_ratio = 1e300;
    while (quads < 100) {
        FramedKGon g;
        try {
            g = frame_real_kgon(sampling::random_real_points(rng, 4), {-1, -1, 1, 1});
        } catch (const GeometryError&) {
            continue;
        }
        ++quads;
        auto l = *concordant_lengths(g);
        if ((l[0] * l[1]).real() < 0.0 && (l[1] * l[2]).real() > 0.0 && (l[2] * l[3]).real() > 0.0) ++sign_ok;
        min_ratio = std::min(min_ratio, std::abs(lambda_residual(g)) / (std::abs(l[0] * l[2]) + std::abs(l[1] * l[3])));
    }
    return {{"pass", matched == tested && tested >= 990 && sign_ok == 100 && min_ratio >= 1.0 - 1e-12},
            {"measured",
             {{"quadrilaterals", tested}, {"parity_matches", matched}, {"alpha_mmpp_first_length_opposite", sign_ok},
              {"alpha_mmpp_min_lambda_ratio", min_ratio}}},
            {"thresholds", {{"lambda_ratio_min", 1.0}}}};
}

inline json integral_plane_check(Rng& rng) {
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        FramedKGon g = sampling::random_framed_kgon(rng, 4);
        auto l = concordant_lengths(g);
        if (!l || on_lambda(g)) continue;
        double er = uniform(rng, -2, 2);
        IntegralPlane P = integral_plane(g, cplx(er, uniform(rng, -2, 2)));
        double scale = std::abs((*l)[1] * (*l)[3]) + std::abs((*l)[0] * (*l)[2]);
        worst = std::max(worst, std::abs(P.product_identity_residual()) / scale);
        ++done;
    }
    auto b = make_builtin("type3");
    double angle = 0.0;
    for (auto [t1, t2] : {std::pair{0.5, 2.2}, std::pair{0.9, 2.0}, std::pair{0.3, 2.6}}) {
        Orbit o = extend_orbit(b.billiard, t1, t2);
        FramedKGon g = frame_orbit(b.billiard, o);
        FramedTangent T1 = lifted_family_tangent(b.billiard, o, 0), T2 = lifted_family_tangent(b.billiard, o, 1);
        IntegralPlane P = integral_plane_through(g, T1);
        Eigen::MatrixXcd fam(12, 2), con(12, 2);
        fam << T1.flat(), T2.flat();
        con << P.basis[0].flat(), P.basis[1].flat();
        angle = std::max(angle, max_principal_angle(fam, con));
    }
    return {{"pass", worst < 1e-8 && angle < 1e-6},
            {"measured", {{"states", done}, {"max_relative_product_residual", worst}, {"type3_max_principal_angle", angle}}},
            {"thresholds", {{"product_residual", 1e-8}, {"principal_angle", 1e-6}}}};
}

inline json birkhoff_tangency(Rng& rng) {
    double worst = 0.0;
    int tangents = 0;
    std::vector<BuiltinBilliard> passing = positive_controls();
    passing.push_back(make_builtin("alpha3"));
    for (const auto& b : passing) {
        const int n = 4;
        for (int i = 0; i < n; ++i) {
            Orbit o = extend_orbit(b.billiard, b.patch.t1(i, n), b.patch.t2(n - 1 - i, n));
            if (!o.closed) continue;
            FramedKGon g = frame_orbit(b.billiard, o);
            for (int w = 0; w < 2; ++w) {
                worst = std::max(worst, distribution_residual(g, lifted_family_tangent(b.billiard, o, w)));
                ++tangents;
            }
        }
    }
    json dims = json::object();
    bool dims_ok = true;
    for (int k : {3, 4, 5}) {
        int total = 0, good = 0;
        while (total < 1000) {
            FramedKGon g = sampling::random_framed_kgon(rng, k);
            try {
                validate(g);
            } catch (const GeometryError&) {
                continue;
            }
            ++total;
            DistributionReport r = distribution_dimension(g);
            if (r.dimension == k && !r.singular) ++good;
        }
        double frac = double(good) / total;
        dims["k" + std::to_string(k)] = frac;
        dims_ok = dims_ok && frac >= 0.99;
    }
    return {{"pass", worst < 1e-7 && tangents > 0 && dims_ok},
            {"measured", {{"family_tangents", tangents}, {"max_distribution_residual", worst}, {"dimension_k_fraction", dims}}},
            {"thresholds", {{"distribution_residual", 1e-7}, {"dimension_fraction_min", 0.99}}}};
}

inline json commuting(Rng& rng) {
    ConfocalFamily f(1.0), g(1.025, Frame{0.0, 0.025, 0.0});
    auto lines = sampling::random_lines(rng, 1000, 3.2);
    int skipped = 0;
    double conf = commute_residual(ConvexBody::ellipse(f, 4.0), ConvexBody::ellipse(f, 9.0), lines, &skipped);
    double disp = commute_residual(ConvexBody::ellipse(g, 4.0), ConvexBody::ellipse(f, 9.0), lines);
    return {{"pass", conf < 1e-9 && disp > 1e-3},
            {"measured", {{"samples", 1000}, {"skipped", skipped}, {"confocal_residual", conf}, {"displaced_residual", disp}}},
            {"thresholds", {{"confocal_max", 1e-9}, {"displaced_min", 1e-3}}}};
}

inline json invisibility(Rng& rng) {
    auto arcs = parabolic_invisible_assembly();
    RayTrace t = trace_ray(arcs, parabolic_design_ray(), 8);
    ScanReport s = invisibility_scan(arcs, ScanWindow{-0.02, 0.02, 0.3, 0.7}, 65);
    double worst = 0.0;
    json configs = json::array();
    for (int n = 0; n < 8; ++n) {
        LawAssembly a = random_two_neighbor_skew_assembly(rng, n);
        ScanReport r = invisibility_scan(a.arcs, ScanWindow{a.entry.phi - 0.05, a.entry.phi + 0.05, a.entry.p - 0.05, a.entry.p + 0.05}, 41, 1e-6);
        worst = std::max(worst, r.fraction_invisible);
        configs.push_back(io::to_json(r));
    }
    bool pass = t.invisible && t.reflection_count == 4 && s.max_family_dimension_estimate <= 1.0 && worst < 0.01;
    return {{"pass", pass},
            {"measured",
             {{"design_ray_invisible", t.invisible}, {"design_ray_reflections", t.reflection_count}, {"assembly_scan", io::to_json(s)},
              {"two_neighbor_skew_max_fraction", worst}, {"two_neighbor_skew_scans", configs}}},
            {"thresholds", {{"dimension_max", 1.0}, {"fraction_max", 0.01}, {"tol", 1e-6}}}};
}

inline std::vector<Criterion> criteria() {
    return {{1, "reflection-oracle", "projective_core", reflection_oracle},
            {2, "positive-controls", "reflectivity", positive_families},
            {3, "negative-controls", "reflectivity", negative_controls},
            {4, "first-integral", "triangular_fields", first_integral},
            {5, "skew-parity", "real_billiards", skew_parity},
            {6, "concordance", "birkhoff", concordance},
            {7, "integral-plane", "birkhoff", integral_plane_check},
            {8, "birkhoff-tangency", "birkhoff", birkhoff_tangency},
            {9, "commuting-billiards", "real_billiards", commuting},
            {10, "invisibility", "real_billiards", invisibility}};
}

// `only` holds criterion ids, names or module names; empty runs everything.
inline json run(std::uint64_t seed, const std::set<std::string>& only = {}) {
    json out;
    out["seed"] = seed;
    out["criteria"] = json::array();
    bool all = true;
    for (const Criterion& c : criteria()) {
        if (!only.empty() && !only.count(std::to_string(c.id)) && !only.count(c.name) && !only.count(c.module)) continue;
        Rng rng(seed * 1000003ULL + std::uint64_t(c.id));
        json r;
        try {
            r = c.run(rng);
        } catch (const std::exception& e) {
            r = {{"pass", false}, {"error", e.what()}};
        }
        json entry = {{"id", c.id}, {"name", c.name}, {"module", c.module}};
        entry.update(r);
        all = all && r["pass"].get<bool>();
        out["criteria"].push_back(entry);
    }
    out["all_pass"] = all;
    return out;
}

} // namespace cbill::suite
