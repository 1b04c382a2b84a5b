#include <gtest/gtest.h>

#include <random>

#include "cbill/builtins.hpp"
#include "cbill/real_billiards.hpp"

using namespace cbill;

namespace {

std::mt19937_64 rng(77);

double rand_r(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::vector<OrientedLine> random_lines(int n, double pmax) {
    std::vector<OrientedLine> out;
    for (int i = 0; i < n; ++i) out.emplace_back(rand_r(0, 2 * kPi), rand_r(-pmax, pmax));
    return out;
}

Vec2d re(const Vec2c& v) { return v.real(); }

// random germ chain hit transversally by l; mirrors are circles, lines and rotated ellipses
std::vector<Reflector> random_chain(const OrientedLine& l0, const std::vector<Law>& laws) {
    std::vector<Reflector> out;
    OrientedLine cur = l0;
    Vec2d x = l0.point();
    for (Law law : laws) {
        Vec2d d = cur.direction();
        Vec2d X = x + rand_r(1.0, 3.0) * d;
        for (int attempt = 0;; ++attempt) {
            int kind = static_cast<int>(rng() % 3);
            Mirror m = Mirror::line(Vec2c::Zero(), Vec2c(1.0, 0.0));
            double t = 0.0;
            if (kind == 0) {
                double a = rand_r(0, 2 * kPi), r = rand_r(0.5, 3.0);
                Vec2d c = X - r * Vec2d(std::cos(a), std::sin(a));
                m = Mirror::circle(c.cast<cplx>(), r * r);
                t = a;
            } else if (kind == 1) {
                double a = rand_r(0, 2 * kPi);
                m = Mirror::line(X.cast<cplx>(), Vec2c(std::cos(a), std::sin(a)));
            } else {
                ConfocalFamily f(rand_r(0.5, 1.5), Frame{rand_r(0, 2 * kPi), 0.0, 0.0});
                Mirror e = conic_at(f, f.c * f.c + rand_r(0.5, 3.0));
                t = rand_r(0, 2 * kPi);
                Vec2d off = X - re(e.point(t));
                f.frame.ox = off(0);
                f.frame.oy = off(1);
                m = conic_at(f, e.value());
            }
            Vec2d T = re(m.derivative(t)).normalized();
            if (std::abs(cross2(d, T)) < 0.3) continue;
            out.push_back({m, t, law});
            cur = OrientedLine::through(X, detail::apply_law(d, T, law));
            x = X;
            break;
        }
    }
    return out;
}

std::vector<Law> random_laws(int k) {
    std::vector<Law> laws;
    for (int i = 0; i < k; ++i) laws.push_back(rng() % 2 ? Law::Skew : Law::Usual);
    return laws;
}

} // namespace

TEST(OrientedLine, OrientationMatters) {
    OrientedLine a(0.3, 0.7), b = a.reversed();
    EXPECT_GT(line_distance(a, b), 1.0);
    EXPECT_NEAR(std::abs(b.normal().dot(a.point())), 0.7, 1e-15);
    EXPECT_NEAR(b.p, -0.7, 0.0);
    OrientedLine c = OrientedLine::through(Vec2d(0.0, 2.0), Vec2d(1.0, 0.0));
    EXPECT_NEAR(c.phi, 0.0, 0.0);
    EXPECT_NEAR(c.p, 2.0, 1e-15);
    EXPECT_LT(line_distance(OrientedLine(2 * kPi - 1e-12, 0.1), OrientedLine(0.0, 0.1)), 1e-11);
}

TEST(LawType, SideExamples) {
    Vec2d A(-1, 1), B(0, 0), C(1, 1);
    EXPECT_EQ(law_type(A, B, C, OrientedLine(0.0, 0.0)), Law::Usual);
    EXPECT_EQ(law_type(A, B, C, OrientedLine(kPi / 2, 0.0)), Law::Skew);
    EXPECT_THROW(law_type(A, B, Vec2d(2, 1), OrientedLine(0.0, 0.0)), GeometryError);
    EXPECT_THROW(law_type(Vec2d(-1, 0), B, C, OrientedLine(0.0, 0.0)), GeometryError);
}

TEST(LawType, Type1OrbitIsSkewOnTheLineMirror) {
    auto b = make_builtin("type1");
    int checked = 0;
    for (double t1 : {-0.8, -0.3, 0.4, 0.9})
        for (double t2 : {-0.4, 0.1, 0.3}) {
            Orbit o = extend_orbit(b.billiard, t1, t2);
            if (!o.closed) continue;
            std::vector<Vec2d> V;
            for (const auto& v : o.vertices) V.push_back(re(v.A));
            for (int j : {0, 2}) {
                Vec2d P = V[j];
                OrientedLine L = OrientedLine::through(P, Vec2d(1.0, 0.0));
                EXPECT_EQ(law_type(V[(j + 3) % 4], P, V[(j + 1) % 4], L), Law::Skew);
            }
            ++checked;
        }
    EXPECT_GT(checked, 8);
}

TEST(LawType, ConfocalEllipseQuadrilateralsAreSkewAtTheInnerConic) {
    auto b = make_builtin("type3");
    ClosureReport r = verify_k_reflectivity(b.billiard, b.patch, 24, 1e-9);
    EXPECT_GE(r.fraction_closed, 0.99);
    int checked = 0;
    for (double t1 : {0.3, 0.7, 1.1})
        for (double t2 : {1.9, 2.3, 2.7}) {
            Orbit o = extend_orbit(b.billiard, t1, t2);
            ASSERT_TRUE(o.closed);
            std::vector<Vec2d> V;
            for (const auto& v : o.vertices) V.push_back(re(v.A));
            for (int j = 0; j < 4; ++j) {
                Vec2d T = re(b.billiard.mirror(j).derivative(o.vertices[std::size_t(j)].t));
                Law law = law_type(V[std::size_t((j + 3) % 4)], V[std::size_t(j)], V[std::size_t((j + 1) % 4)],
                                   OrientedLine::through(V[std::size_t(j)], T));
                EXPECT_EQ(law, j % 2 == 1 ? Law::Skew : Law::Usual) << j;
            }
            ++checked;
        }
    EXPECT_EQ(checked, 9);
}

TEST(LawPatternAssembly, LawsMatchTheSideTest) {
    for (int n = 0; n < 20; ++n) {
        LawAssembly a = random_two_neighbor_skew_assembly(rng, n);
        RayTrace t = trace_ray(a.arcs, a.entry, 8);
        ASSERT_EQ(t.reflection_count, 4);
        for (int j = 1; j <= 4; ++j) {
            Vec2d A = t.segments[std::size_t(j - 1)].first, B = t.segments[std::size_t(j)].first;
            Vec2d C = B + t.segments[std::size_t(j)].second;
            const BodyArc& arc = a.arcs[std::size_t(j - 1)];
            Vec2d T = arc.tangent(0.5 * (arc.t0 + arc.t1));
            EXPECT_EQ(law_type(A, B, C, OrientedLine::through(B, T), 1e-8), arc.law);
        }
    }
}

TEST(BilliardMap, DisjointLineIsFixed) {
    ConvexBody disk = ConvexBody::disk(Vec2d(0, 0), 1.0);
    OrientedLine l(0.4, 1.5);
    OrientedLine m = billiard_map(disk, l);
    EXPECT_EQ(m.phi, l.phi);
    EXPECT_EQ(m.p, l.p);
}

TEST(BilliardMap, DiameterReverses) {
    OrientedLine m = billiard_map(ConvexBody::disk(Vec2d(0, 0), 1.0), OrientedLine(0.0, 0.0));
    EXPECT_NEAR(m.phi, kPi, 1e-15);
    EXPECT_NEAR(m.p, 0.0, 1e-15);
}

TEST(BilliardMap, DiskChordsMatchIncidenceClosedForm) {
    ConvexBody disk = ConvexBody::disk(Vec2d(0, 0), 1.0);
    for (const OrientedLine& l : random_lines(1000, 0.999)) {
        OrientedLine m = billiard_map(disk, l);
        // the exit point is p n + sqrt(1 - p^2) d; the reflected direction turns by pi + 2 asin p
        OrientedLine oracle(l.phi + kPi + 2.0 * std::asin(l.p), l.p);
        EXPECT_LT(line_distance(m, oracle), 1e-12);
    }
}

TEST(BilliardMap, SecondApplicationIsTheNextChord) {
    ConvexBody disk = ConvexBody::disk(Vec2d(0.3, -0.2), 2.0);
    for (const OrientedLine& l : random_lines(200, 1.5)) {
        OrientedLine m = billiard_map(disk, l), mm = billiard_map(disk, m);
        auto hm = line_hits(disk.arcs(), m), hmm = line_hits(disk.arcs(), mm);
        ASSERT_EQ(hm.size(), 2u);
        ASSERT_EQ(hmm.size(), 2u);
        // consecutive chords share the reflection point and have equal length
        EXPECT_LT((hmm.front().X - hm.back().X).norm(), 1e-12);
        EXPECT_NEAR((hm.back().X - hm.front().X).norm(), (hmm.back().X - hmm.front().X).norm(), 1e-12);
    }
}

TEST(BilliardMap, CornerHitReported) {
    // lower half disk: a half circle and its diameter
    ConvexBody half({BodyArc{Mirror::circle(Vec2c(0, 0), 1.0), kPi, 2 * kPi},
                     BodyArc{Mirror::line(Vec2c(1.0, 0.0), Vec2c(-1.0, 0.0)), 0.0, 2.0}});
    EXPECT_EQ(half.corners().size(), 2u);
    EXPECT_THROW(billiard_map(half, OrientedLine::through(Vec2d(1.0, 0.0), Vec2d(-1.0, -0.5))), GeometryError);
    EXPECT_NO_THROW(billiard_map(half, OrientedLine(kPi / 2, -0.2)));
}

TEST(ConvexBodyTest, RejectsNonConvexAndOpenChains) {
    EXPECT_THROW(ConvexBody({BodyArc{Mirror::circle(Vec2c(0, 0), 1.0), 0.0, kPi}}), GeometryError);
    EXPECT_THROW(ConvexBody({BodyArc{Mirror::circle(Vec2c(0, 0), 1.0), 2 * kPi, 0.0}}), GeometryError);
}

TEST(Commute, ConcentricCircles) {
    auto s = random_lines(1000, 3.0);
    EXPECT_LT(commute_residual(ConvexBody::disk(Vec2d(0, 0), 1.0), ConvexBody::disk(Vec2d(0, 0), 2.5), s), 1e-10);
}

TEST(Commute, ConfocalEllipses) {
    ConfocalFamily f(1.0);
    auto s = random_lines(1000, 3.2);
    int skipped = 0;
    double r = commute_residual(ConvexBody::ellipse(f, 4.0), ConvexBody::ellipse(f, 9.0), s, &skipped);
    EXPECT_LT(r, 1e-9);
    EXPECT_EQ(skipped, 0);
}

TEST(Commute, DisplacedFocusBreaksCommutation) {
    ConfocalFamily f(1.0), g(1.025, Frame{0.0, 0.025, 0.0});
    auto s = random_lines(1000, 3.2);
    EXPECT_GT(commute_residual(ConvexBody::ellipse(g, 4.0), ConvexBody::ellipse(f, 9.0), s), 1e-3);
}

TEST(Commute, IdenticalBodies) {
    ConvexBody e = ConvexBody::ellipse(ConfocalFamily(1.3, Frame{0.4, 0.1, 0.2}), 3.0);
    EXPECT_LT(commute_residual(e, e, random_lines(300, 2.5)), 1e-12);
}

TEST(Commute, NonNestedRejected) {
    EXPECT_THROW(commute_residual(ConvexBody::disk(Vec2d(0, 0), 2.0), ConvexBody::disk(Vec2d(0, 0), 1.0), {}),
                 GeometryError);
}

TEST(SkewParity, CalibrationCases) {
    OrientedLine l(0.0, 0.1);
    Mirror c1 = Mirror::circle(Vec2c(3.0, 0.0), 1.0), c2 = Mirror::circle(Vec2c(0.0, 2.0), 1.0);
    // germs near the first hit of the circle centered at (3, 0)
    double t1 = kPi - 0.1;
    EXPECT_EQ(skew_parity_sign({{c1, t1, Law::Usual}}, l), 1);
    EXPECT_EQ(skew_parity_sign({{c1, t1, Law::Skew}}, l), -1);
    auto chain = random_chain(l, {Law::Skew, Law::Skew});
    EXPECT_EQ(skew_parity_sign(chain, l), 1);
    chain = random_chain(l, {Law::Skew, Law::Usual});
    EXPECT_EQ(skew_parity_sign(chain, l), -1);
    chain = random_chain(l, {Law::Usual, Law::Usual, Law::Usual, Law::Usual});
    EXPECT_EQ(skew_parity_sign(chain, l), 1);
    (void)c2;
}

TEST(SkewParity, RandomConfigurations) {
    for (int n = 0; n < 100; ++n) {
        OrientedLine l(rand_r(0, 2 * kPi), rand_r(-1, 1));
        auto chain = random_chain(l, random_laws(2 + n % 4));
        EXPECT_EQ(skew_parity_sign(chain, l), expected_parity(chain)) << n;
    }
}

TEST(SkewParity, RigidMotionInvariant) {
    for (int n = 0; n < 30; ++n) {
        OrientedLine l(rand_r(0, 2 * kPi), rand_r(-1, 1));
        auto chain = random_chain(l, random_laws(3));
        Frame g{rand_r(0, 2 * kPi), rand_r(-2, 2), rand_r(-2, 2)};
        std::vector<Reflector> moved;
        for (const auto& r : chain) {
            Mirror m = r.mirror.transformed(g);
            moved.push_back({m, m.param_of(g.apply(r.mirror.point(r.t)), r.t).real(), r.law});
        }
        Vec2d x = re(g.apply(l.point().cast<cplx>())), d = re(g.apply_dir(l.direction().cast<cplx>()));
        EXPECT_EQ(skew_parity_sign(moved, OrientedLine::through(x, d)), skew_parity_sign(chain, l));
    }
}

TEST(SkewParity, TangentialHitRejected) {
    Mirror c = Mirror::circle(Vec2c(0.0, 1.0), 1.0);
    EXPECT_THROW(skew_parity_sign({{c, -kPi / 2, Law::Usual}}, OrientedLine(0.0, 0.0)), GeometryError);
}

TEST(TraceRay, EmptyBodyIsInvisible) {
    RayTrace t = trace_ray(std::vector<BodyArc>{}, OrientedLine(0.2, 0.3), 4);
    EXPECT_TRUE(t.invisible);
    EXPECT_EQ(t.reflection_count, 0);
}

TEST(TraceRay, DiskChordIsNotInvisible) {
    ConvexBody disk = ConvexBody::disk(Vec2d(0, 0), 1.0);
    for (const OrientedLine& l : random_lines(100, 0.99)) {
        RayTrace t = trace_ray(disk, l, 4);
        EXPECT_FALSE(t.invisible);
        EXPECT_EQ(t.reflection_count, 1);
    }
}

TEST(TraceRay, BudgetExceededIsTruncated) {
    // narrow wedge of two line mirrors, entered from its open end
    double a = 0.05;
    std::vector<BodyArc> arcs{BodyArc{Mirror::line(Vec2c(0.0, 0.0), Vec2c(std::cos(a), std::sin(a))), 0.0, 50.0},
                              BodyArc{Mirror::line(Vec2c(0.0, 0.0), Vec2c(std::cos(a), -std::sin(a))), 0.0, 50.0}};
    RayTrace t = trace_ray(arcs, OrientedLine(kPi, -0.3), 5);
    EXPECT_TRUE(t.truncated);
    EXPECT_FALSE(t.invisible);
    EXPECT_EQ(t.reflection_count, 5);
}

TEST(TraceRay, ParabolicAssemblyDesignRay) {
    auto arcs = parabolic_invisible_assembly();
    RayTrace t = trace_ray(arcs, parabolic_design_ray(), 8);
    EXPECT_TRUE(t.invisible);
    EXPECT_EQ(t.reflection_count, 4);
    EXPECT_LT(std::abs(angle_difference(t.exit_line.phi, 0.0)), 1e-12);
    EXPECT_NEAR(t.exit_line.p, 0.5, 1e-12);
    // the middle segment runs at half height
    EXPECT_NEAR(t.segments[2].first(1), 0.25, 1e-12);
    // a displaced parallel ray is also returned; a tilted one is not
    EXPECT_TRUE(trace_ray(arcs, OrientedLine(0.0, 0.45), 8).invisible);
    EXPECT_FALSE(trace_ray(arcs, OrientedLine(0.01, 0.5), 8).invisible);
    // the reversed design ray retraces the path backwards
    EXPECT_TRUE(trace_ray(arcs, parabolic_design_ray().reversed(), 8).invisible);
}

TEST(InvisibilityScan, DiskHasNone) {
    ScanReport r = invisibility_scan(ConvexBody::disk(Vec2d(0, 0), 1.0), ScanWindow{0.0, 2 * kPi, -0.9, 0.9}, 40);
    EXPECT_EQ(r.invisible, 0);
    EXPECT_EQ(r.fraction_invisible, 0.0);
}

TEST(InvisibilityScan, ParabolicAssemblyIsOneDimensional) {
    ScanReport r = invisibility_scan(parabolic_invisible_assembly(), ScanWindow{-0.02, 0.02, 0.3, 0.7}, 65);
    EXPECT_GT(r.invisible, 0);
    EXPECT_LT(r.fraction_invisible, 0.05);
    for (auto [i, j] : r.cells) EXPECT_EQ(i, 32);
    EXPECT_LE(r.max_family_dimension_estimate, 1.0);
    EXPECT_GT(r.max_family_dimension_estimate, 0.5);
}

TEST(InvisibilityScan, TwoNeighborSkewConfigurations) {
    for (int n = 0; n < 8; ++n) {
        LawAssembly a = random_two_neighbor_skew_assembly(rng, n);
        Vec2d d = a.entry.direction();
        ScanReport r = invisibility_scan(a.arcs, ScanWindow{a.entry.phi - 0.05, a.entry.phi + 0.05, a.entry.p - 0.05,
                                                            a.entry.p + 0.05},
                                         41, 1e-6);
        EXPECT_LT(r.fraction_invisible, 0.01) << n;
        (void)d;
    }
}

TEST(BoxCounting, SyntheticSets) {
    std::vector<std::pair<int, int>> line, square;
    for (int i = 0; i < 64; ++i) line.push_back({i, 7});
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) square.push_back({i, j});
    EXPECT_NEAR(box_counting_dimension(line, 64), 1.0, 1e-12);
    EXPECT_NEAR(box_counting_dimension(square, 64), 2.0, 1e-12);
    EXPECT_EQ(box_counting_dimension({{3, 3}}, 64), 0.0);
}
