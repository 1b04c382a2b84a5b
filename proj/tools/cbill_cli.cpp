// cbill: verification runs, reports, trajectories and figures for complex planar billiards.
//
// Exit codes: 0 pass, 1 checked failure, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cbill/builtins.hpp"
#include "cbill/io.hpp"
#include "cbill/sampling.hpp"
#include "cbill/suite.hpp"
#include "cbill/svg.hpp"

using namespace cbill;
using io::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string input, builtin, patch, out, figure = "orbits", what = "orbit";
    std::vector<std::string> only;
    std::vector<double> lambdas{4.0, 2.0};
    double foci = 1.0, tol = 1e-9, t1 = 0.7, t2 = 2.3;
    int grid = 16, variant = 0, steps = 1000;
    std::uint64_t seed = 1;
};

void write_out(const RunConfig& c, const std::string& text) {
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + c.out + "'");
    f << text;
}

// input JSON may be a bare billiard or {"billiard": ..., "patch": ...}
BuiltinBilliard load_billiard(const RunConfig& c) {
    if (c.input.empty() == c.builtin.empty()) throw UsageError("exactly one of --input or --builtin is required");
    BuiltinBilliard b;
    if (!c.builtin.empty()) {
        b = make_builtin(c.builtin, BuiltinOptions{c.foci, c.lambdas, c.variant});
    } else {
        json j = io::read_json_file(c.input);
        const json& bj = j.contains("billiard") ? j["billiard"] : j;
        b.name = c.input;
        b.billiard = io::billiard_from(bj);
        b.patch = j.contains("patch") ? io::patch_from(j["patch"]) : Patch{0.2, 1.2, 1.8, 2.8};
    }
    if (!c.patch.empty()) b.patch = io::patch_from_string(c.patch);
    return b;
}

int cmd_verify(const RunConfig& c) {
    if (!(c.tol > 0.0) || c.grid < 1) throw UsageError("--tol must be positive and --grid at least 1");
    BuiltinBilliard b = load_billiard(c);
    json out = {{"billiard", b.name}, {"k", b.billiard.size()}, {"patch", io::to_json(b.patch)}};
    bool pass = false;
    try {
        ClosureReport r = verify_k_reflectivity(b.billiard, b.patch, c.grid, c.tol);
        out["report"] = io::to_json(r);
        pass = r.passes();
    } catch (const GeometryError& e) {
        if (e.kind() == ErrorKind::Malformed) throw;
        out["error"] = e.what();
    }
    out["pass"] = pass;
    write_out(c, out.dump(2) + "\n");
    return pass ? 0 : 1;
}

std::vector<Orbit> family_orbits(const BuiltinBilliard& b, int n) {
    std::vector<Orbit> all, real;
    verify_k_reflectivity(b.billiard, b.patch, n, 1e-9, &all);
    for (const Orbit& o : all)
        if (o.closed && svg::is_real_orbit(o)) real.push_back(o);
    return real;
}

std::vector<RayTrace> assembly_traces(const std::vector<BodyArc>& arcs, const OrientedLine& center, int n) {
    std::vector<RayTrace> out;
    for (int i = 0; i < n; ++i) {
        double dp = n == 1 ? 0.0 : -0.15 + 0.3 * i / (n - 1);
        out.push_back(trace_ray(arcs, OrientedLine(center.phi, center.p + dp), 16));
    }
    return out;
}

int cmd_render(const RunConfig& c) {
    std::string doc;
    if (c.figure == "orbits") {
        BuiltinBilliard b = load_billiard(c);
        std::vector<Orbit> orbits = family_orbits(b, std::min(c.grid, 8));
        if (orbits.empty()) throw UsageError("no real closed orbits to draw");
        std::vector<Vec2d> pts;
        for (const Orbit& o : orbits)
            for (const auto& v : o.vertices) pts.push_back(v.A.real());
        doc = svg::billiard_figure(b.billiard, orbits, svg::bounding(pts, 0.25));
    } else if (c.figure == "spiral") {
        sampling::Rng rng(c.seed);
        SpiralTrajectory tr = integrate_spiral(sampling::random_spiral_start(rng, true, false), c.steps, 1e-3);
        if (tr.states.size() < 2) throw UsageError("empty trajectory");
        doc = svg::spiral_figure(tr);
    } else if (c.figure == "trace") {
        std::vector<BodyArc> arcs = c.input.empty() ? parabolic_invisible_assembly() : io::arcs_from(io::read_json_file(c.input));
        if (arcs.empty()) throw UsageError("no arcs to trace");
        doc = svg::trace_figure(arcs, assembly_traces(arcs, parabolic_design_ray(), 7), svg::ViewBox{-6, 6, -3, 3});
    } else {
        throw UsageError("unknown figure '" + c.figure + "'");
    }
    write_out(c, doc);
    return 0;
}

int cmd_emit(const RunConfig& c) {
    if (c.what == "orbit") {
        BuiltinBilliard b = load_billiard(c);
        Orbit o = extend_orbit(b.billiard, c.t1, c.t2);
        write_out(c, io::orbit_csv(o));
        return o.closed ? 0 : 1;
    }
    if (c.what == "spiral") {
        sampling::Rng rng(c.seed);
        SpiralTrajectory tr = integrate_spiral(sampling::random_spiral_start(rng, true, false), c.steps, 1e-3);
        write_out(c, io::trajectory_csv(tr));
        return tr.truncated ? 1 : 0;
    }
    if (c.what == "trace") {
        std::vector<BodyArc> arcs = c.input.empty() ? parabolic_invisible_assembly() : io::arcs_from(io::read_json_file(c.input));
        json out = json::array();
        for (const RayTrace& t : assembly_traces(arcs, parabolic_design_ray(), 7)) out.push_back(io::to_json(t));
        write_out(c, out.dump(2) + "\n");
        return 0;
    }
    if (c.what == "builtin") {
        BuiltinBilliard b = load_billiard(c);
        write_out(c, json{{"billiard", io::to_json(b.billiard)}, {"patch", io::to_json(b.patch)}}.dump(2) + "\n");
        return 0;
    }
    throw UsageError("unknown emit kind '" + c.what + "'");
}

int cmd_suite(const RunConfig& c) {
    std::set<std::string> only;
    for (const std::string& s : c.only) {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) only.insert(item);
    }
    json r = suite::run(c.seed, only);
    if (r["criteria"].empty()) throw UsageError("--only selects no criterion");
    write_out(c, r.dump(2) + "\n");
    return r["all_pass"].get<bool>() ? 0 : 1;
}

void add_source(CLI::App* sub, RunConfig& c) {
    sub->add_option("--input", c.input, "billiard JSON file");
    sub->add_option("--builtin", c.builtin, "builtin billiard name");
    sub->add_option("--foci", c.foci, "half focal distance for type3");
    sub->add_option("--lambdas", c.lambdas, "two confocal parameters for type3")->expected(2);
    sub->add_option("--variant", c.variant, "topotype variant");
    sub->add_option("--patch", c.patch, "t1_from,t1_to,t2_from,t2_to or a JSON array");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex planar billiards: reflectivity checks, invariants and figures"};
    app.require_subcommand(1);
    RunConfig c;

    auto* verify = app.add_subcommand("verify", "check k-reflectivity on a patch grid");
    add_source(verify, c);
    verify->add_option("--grid", c.grid, "cells per patch side");
    verify->add_option("--tol", c.tol, "closure tolerance");

    auto* render = app.add_subcommand("render", "write an SVG figure");
    add_source(render, c);
    render->add_option("--figure", c.figure, "orbits, spiral or trace");
    render->add_option("--grid", c.grid, "orbit family grid");
    render->add_option("--seed", c.seed, "seed for the spiral start");
    render->add_option("--steps", c.steps, "spiral steps");

    auto* emit = app.add_subcommand("emit", "write orbit or trajectory data");
    add_source(emit, c);
    emit->add_option("--what", c.what, "orbit, spiral, trace or builtin");
    emit->add_option("--t1", c.t1, "first vertex parameter");
    emit->add_option("--t2", c.t2, "second vertex parameter");
    emit->add_option("--seed", c.seed, "seed for the spiral start");
    emit->add_option("--steps", c.steps, "spiral steps");

    auto* suite = app.add_subcommand("suite", "run the acceptance battery");
    suite->add_option("--seed", c.seed, "master seed");
    suite->add_option("--only", c.only, "criterion ids, names or module names");

    for (auto* sub : {verify, render, emit, suite}) sub->add_option("--out", c.out, "output path, stdout if absent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*verify) return cmd_verify(c);
        if (*render) return cmd_render(c);
        if (*emit) return cmd_emit(c);
        return cmd_suite(c);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
    }
    return 2;
}
