#include <gtest/gtest.h>

#include <random>

#include "cbill/builtins.hpp"
#include "cbill/triangular_fields.hpp"

using namespace cbill;

namespace {

std::mt19937_64 rng(99);

double rand_r(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec2c rvec(double lo, double hi) { return Vec2c(rand_r(lo, hi), rand_r(lo, hi)); }

Vec2c cvec(double lo, double hi) { return Vec2c(cplx(rand_r(lo, hi), rand_r(lo, hi)), cplx(rand_r(lo, hi), rand_r(lo, hi))); }

// reflection of x about the line through B with direction v, written out directly
Vec2c reflect_point(const Vec2c& x, const Vec2c& B, const Vec2c& v) {
    Vec2c d = x - B;
    return B + 2.0 * bilinear_form(d, v) / bilinear_form(v, v) * v - d;
}

double euclid(const Vec2c& a, const Vec2c& b) { return std::hypot(std::abs(a(0) - b(0)), std::abs(a(1) - b(1))); }

// random real start: A = 0, C on H(AB) at a random signed ratio
FramedTriangleState random_real_state(bool extB, bool extC) {
    Vec2c A(0.0, 0.0);
    double psi = rand_r(0.4, 2.6);
    Mat2c H = rotation(psi);
    double r = rand_r(0.8, 1.5), th = rand_r(0, 2 * kPi);
    Vec2c B(r * std::cos(th), r * std::sin(th));
    Vec2c C = rand_r(0.6, 1.6) * (H * B);
    return frame_triangle(A, H, B, C, bisector_hint(B, A, C, extB), bisector_hint(C, A, B, extC));
}

} // namespace

TEST(ConcordantPair, RealBisectors) {
    Vec2c A(-1.0, 1.0), B(0.0, 0.0), C(2.0, 0.5);
    Vec2c e1 = (A - B) / (A - B).norm(), e2 = (C - B) / (C - B).norm();
    ProjLine ext = ProjLine::through(B, e1 - e2), in = ProjLine::through(B, e1 + e2);
    ConcordantPair pe = concordant_pair(A, B, C, ext), pi = concordant_pair(A, B, C, in);
    EXPECT_NEAR(std::abs(pe.ba), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(pe.bc), std::sqrt(4.25), 1e-14);
    EXPECT_GT((pe.ba * pe.bc).real(), 0.0);
    EXPECT_LT((pi.ba * pi.bc).real(), 0.0);
    EXPECT_NEAR(std::abs(pi.bc), std::sqrt(4.25), 1e-14);
}

TEST(ConcordantPair, ComplexRatioMatchesTransportOracle) {
    for (int n = 0; n < 200; ++n) {
        Vec2c A = cvec(-2, 2), B = cvec(-2, 2), C = cvec(-2, 2);
        auto cands = detail::bisector_units(B, A, C);
        for (const Vec2c& v : cands) {
            ProjLine L = ProjLine::through(B, v);
            ConcordantPair p = concordant_pair(A, B, C, L);
            // distance function on BA with |BA| = r1; transport x = B + eps * (A - B) / r1 by the symmetry
            cplx r1 = std::sqrt(bilinear_form(A - B, A - B)), r2 = std::sqrt(bilinear_form(C - B, C - B));
            Vec2c e2 = (C - B) / r2;
            double eps = 0.3;
            Vec2c sx = reflect_point(B + eps * (A - B) / r1, B, v);
            cplx w = bilinear_form(sx - B, e2);
            cplx m = -eps / w;  // d(y) = m * w(y) gives d(sigma x) = -eps
            cplx oracle_ratio = r1 / (m * r2);
            ASSERT_LT(std::abs(p.ba / p.bc - oracle_ratio), 1e-10 * std::abs(oracle_ratio));
            ASSERT_LT(std::abs(std::abs(m) - 1.0), 1e-10);
        }
    }
}

TEST(ConcordantPair, IsotropicEdgeRejected) {
    Vec2c B(0.0, 0.0), A(1.0, kI), C(1.0, 2.0);
    EXPECT_THROW(concordant_pair(A, B, C, ProjLine::through(B, Vec2c(1.0, 0.0))), GeometryError);
}

TEST(SquaredPerimeter, ExteriorBisectorsGiveEuclideanPerimeter) {
    Vec2c A(0.0, 0.0), B(2.0, 0.3), C(0.4, 1.7);
    Mat2c H = rotation(std::atan2(1.7, 0.4) - std::atan2(0.3, 2.0));
    auto s = frame_triangle(A, H, B, C, bisector_hint(B, A, C, true), bisector_hint(C, A, B, true));
    validate(s);
    double per = euclid(A, B) + euclid(B, C) + euclid(C, A);
    EXPECT_NEAR(std::abs(squared_perimeter(s) - per * per), 0.0, 1e-12);
}

TEST(SquaredPerimeter, ExteriorThenInteriorGivesSignedPerimeter) {
    Vec2c A(0.0, 0.0), B(2.0, 0.3), C(0.4, 1.7);
    Mat2c H = rotation(std::atan2(1.7, 0.4) - std::atan2(0.3, 2.0));
    auto s = frame_triangle(A, H, B, C, bisector_hint(B, A, C, true), bisector_hint(C, A, B, false));
    double per = euclid(A, B) + euclid(B, C) - euclid(C, A);
    EXPECT_NEAR(std::abs(squared_perimeter(s) - per * per), 0.0, 1e-12);
}

TEST(SquaredPerimeter, ComplexRotationInvariance) {
    for (int n = 0; n < 50; ++n) {
        auto s = random_real_state(n % 2 == 0, n % 3 == 0);
        Mat2c g = rotation(cplx(rand_r(-1, 1), rand_r(-0.5, 0.5)));
        auto r = rotated(s, g);
        validate(r);
        EXPECT_LT(std::abs(squared_perimeter(r) - squared_perimeter(s)), 1e-11 * std::abs(squared_perimeter(s)));
    }
}

TEST(SquaredPerimeter, GlobalSignFreeUnderFrameOrientation) {
    auto s = random_real_state(true, false);
    auto t = s;
    t.uB = -t.uB;
    t.uC = -t.uC;
    EXPECT_EQ(squared_perimeter(s), squared_perimeter(t));
}

TEST(LineField, AnnihilatesConstraintDifferential) {
    for (int n = 0; n < 200; ++n) {
        Vec2c A = cvec(-1, 1);
        Mat2c H = rotation(cplx(rand_r(0.3, 2.5), rand_r(-0.5, 0.5)));
        Vec2c B = A + cvec(-2, 2);
        Vec2c C = A + cplx(rand_r(0.5, 1.5), rand_r(-0.5, 0.5)) * (H * (B - A));
        auto s = frame_triangle(A, H, B, C, bisector_hint(B, A, C, true), bisector_hint(C, A, B, true));
        FieldVector f = line_field_direction(s);
        auto F = [&](double e) { return det2(C + e * f.dC - A, H * (B + e * f.dB - A)); };
        double h = 1e-6;
        cplx dF = (F(h) - F(-h)) / (2 * h);
        double scale = (B - A).norm() * (C - A).norm();
        ASSERT_LT(std::abs(dF), 1e-10 * scale * (1.0 + f.dC.norm()));
        ASSERT_LT(std::abs(det2(f.dB, s.uB)), 1e-14);
        ASSERT_LT(std::abs(det2(f.dC, s.uC)), 1e-12 * f.dC.norm());
        ASSERT_LT(std::abs(bilinear_form(f.dB, f.dB) - 1.0), 1e-12);
    }
}

TEST(LineField, CircleCaseIsTangent) {
    Vec2c A(0.0, 0.0), B(0.6, 0.8), C = -B;
    auto s = frame_triangle(A, -Mat2c::Identity(), B, C, Vec2c(-0.8, 0.6), Vec2c(0.8, -0.6));
    validate(s);
    FieldVector f = line_field_direction(s);
    EXPECT_LT(std::abs(bilinear_form(f.dB, B)), 1e-14);
    EXPECT_LT(std::abs(bilinear_form(f.dC, C)), 1e-14);
}

TEST(LineField, SymmetricConfigurationStaysSymmetric) {
    // configuration symmetric about the x-axis through A
    Vec2c A(0.0, 0.0), B(1.2, 0.7), C(1.2, -0.7);
    Mat2c H = rotation(-2.0 * std::atan2(0.7, 1.2));
    Mat2c mirror;
    mirror << 1.0, 0.0, 0.0, -1.0;
    for (bool ext : {true, false}) {
        Vec2c hB = bisector_hint(B, A, C, ext);
        auto s = frame_triangle(A, H, B, C, hB, mirror * hB);
        validate(s);
        FieldVector f = line_field_direction(s);
        // the mirror swaps B and C and reverses time
        double d = std::min((f.dC - mirror * f.dB).norm(), (f.dC + mirror * f.dB).norm());
        EXPECT_LT(d, 1e-12) << ext;
    }
}

TEST(LineField, RotationEquivariance) {
    for (int n = 0; n < 100; ++n) {
        auto s = random_real_state(n % 2 == 0, n % 3 == 0);
        Mat2c g = rotation(cplx(rand_r(-2, 2), rand_r(-0.7, 0.7)));
        FieldVector f = line_field_direction(s), fg = line_field_direction(rotated(s, g));
        ASSERT_LT((fg.dB - g * f.dB).norm(), 1e-10);
        ASSERT_LT((fg.dC - g * f.dC).norm(), 1e-10 * (1.0 + f.dC.norm()));
    }
}

TEST(LineField, SingularStateReported) {
    // C - A parallel to the frame line at C makes the constraint unsolvable for C
    Vec2c A(0.0, 0.0), B(1.0, 0.0);
    Mat2c H = rotation(kPi / 2);
    FramedTriangleState s{A, H, B, Vec2c(0.0, 1.0), Vec2c(1.0, 0.0), Vec2c(0.0, 1.0)};
    EXPECT_THROW(line_field_direction(s), GeometryError);
}

TEST(Validate, RejectsNonMembers) {
    Vec2c A(0.0, 0.0), B(1.0, 0.2), C(0.1, 1.0);
    Mat2c H = rotation(std::atan2(1.0, 0.1) - std::atan2(0.2, 1.0));
    auto s = frame_triangle(A, H, B, C, bisector_hint(B, A, C, true), bisector_hint(C, A, B, true));
    EXPECT_NO_THROW(validate(s));
    auto bad = s;
    bad.H = Mat2c::Identity();
    EXPECT_THROW(validate(bad), GeometryError);
    bad = s;
    bad.C = Vec2c(0.5, 1.0);
    EXPECT_THROW(validate(bad), GeometryError);
    bad = s;
    bad.uB = Vec2c(1.0, 0.0);
    EXPECT_THROW(validate(bad), GeometryError);
    bad = s;
    bad.H = 2.0 * rotation(0.3);
    EXPECT_THROW(validate(bad), GeometryError);
}

// Starts whose trajectory runs into the singular locus within the span are redrawn; the drift
// up to the truncation point is still checked.
TEST(Spiral, FirstIntegralRandomRealStarts) {
    int done = 0, draws = 0;
    while (done < 20 && draws < 60) {
        auto s = random_real_state(draws % 2 == 0, draws % 4 < 2);
        ++draws;
        auto tr = integrate_spiral(s, 1000, 1e-3);
        EXPECT_LT(tr.max_relative_drift(), 1e-8);
        if (tr.truncated) {
            EXPECT_NE(tr.diagnostic.find("singular-state"), std::string::npos);
            continue;
        }
        ++done;
    }
    EXPECT_EQ(done, 20);
}

TEST(Spiral, FirstIntegralComplexStart) {
    Vec2c A(0.0, 0.0);
    Mat2c H = rotation(cplx(1.1, 0.2));
    Vec2c B(cplx(1.0, 0.1), cplx(0.3, -0.2));
    Vec2c C = cplx(0.9, 0.1) * (H * B);
    auto s = frame_triangle(A, H, B, C, bisector_hint(B, A, C, true), bisector_hint(C, A, B, true));
    auto tr = integrate_spiral(s, 500, 1e-3);
    ASSERT_FALSE(tr.truncated) << tr.diagnostic;
    EXPECT_LT(tr.max_relative_drift(), 1e-8);
}

TEST(Spiral, CircleCaseHasNoDrift) {
    Vec2c A(0.0, 0.0), B(0.6, 0.8);
    auto s = frame_triangle(A, -Mat2c::Identity(), B, -B, Vec2c(-0.8, 0.6), Vec2c(0.8, -0.6));
    auto tr = integrate_spiral(s, 1000, 1e-3);
    ASSERT_FALSE(tr.truncated) << tr.diagnostic;
    EXPECT_LT(tr.max_relative_drift(), 1e-12);
    for (const auto& st : tr.states) {
        EXPECT_NEAR(std::abs(bilinear_form(st.B, st.B) - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(bilinear_form(st.C, st.C) - 1.0), 0.0, 1e-12);
    }
    // B has turned by the elapsed arclength
    EXPECT_NEAR(euclid(tr.states.back().B, tr.states.front().B), 2.0 * std::sin(0.5), 1e-9);
}

TEST(Spiral, RotatedStartGivesRotatedTrajectory) {
    auto s = random_real_state(true, true);
    Mat2c g = rotation(0.9);
    auto t0 = integrate_spiral(s, 300, 1e-3);
    auto t1 = integrate_spiral(rotated(s, g), 300, 1e-3);
    ASSERT_EQ(t0.states.size(), t1.states.size());
    for (std::size_t i = 0; i < t0.states.size(); ++i) {
        ASSERT_LT((t1.states[i].B - g * t0.states[i].B).norm(), 1e-8);
        ASSERT_LT((t1.states[i].C - g * t0.states[i].C).norm(), 1e-8);
    }
}

TEST(Spiral, ProjectionsAreImmersed) {
    auto s = random_real_state(true, false);
    auto tr = integrate_spiral(s, 400, 1e-3);
    ASSERT_FALSE(tr.truncated);
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
        EXPECT_GT((tr.states[i].B - tr.states[i - 1].B).norm(), 1e-4);
        EXPECT_GT((tr.states[i].C - tr.states[i - 1].C).norm(), 1e-9);
    }
}

TEST(Spiral, StaysOnTheConstraintVariety) {
    auto s = random_real_state(false, true);
    auto tr = integrate_spiral(s, 500, 1e-3);
    for (const auto& st : tr.states) EXPECT_NO_THROW(validate(st, 1e-8));
}

// Degenerate orbits A B C D with D = A inside a reflective billiard whose middle mirrors are
// circles about A (the collinear case AB = AC, H = -Id).
TEST(Consistency, DegenerateCircleFamilyFollowsLineField) {
    Vec2c A(0.0, 0.0);
    Billiard bl;
    bl.mirrors = {Mirror::line(A, Vec2c(1.0, 0.3)), Mirror::circle(A, 1.0), Mirror::circle(A, 2.25),
                  Mirror::line(A, Vec2c(-0.3, 1.0))};
    auto orbit = [&](double t, const Orbit* seed) { return extend_orbit(bl, 0.0, t, seed); };
    Orbit o = orbit(0.7, nullptr);
    ASSERT_TRUE(o.degenerate);
    for (const auto& v : o.verdicts) EXPECT_TRUE(v.holds());
    EXPECT_EQ(o.verdicts.back().kind, VerdictKind::VertexCoincidence);
    EXPECT_LT(o.vertices[3].A.norm(), 1e-12);
    for (double t : {0.4, 0.7, 1.3, 2.0}) {
        Orbit c0 = orbit(t, &o);
        double h = 1e-5;
        Orbit cp = orbit(t + h, &c0), cm = orbit(t - h, &c0);
        Vec2c B = c0.vertices[1].A, C = c0.vertices[2].A;
        Vec2c dB = bl.mirrors[1].derivative(t);
        Vec2c dC = (cp.vertices[2].A - cm.vertices[2].A) / (2 * h);
        FramedTriangleState s{A, -Mat2c::Identity(), B, C, detail::unit(dB),
                              detail::unit(bl.mirrors[2].tangent_line(c0.vertices[2].t).direction())};
        validate(s);
        FieldVector f = line_field_direction(s);
        cplx lam = bilinear_form(dB, s.uB);
        EXPECT_LT((lam * f.dC - dC).norm(), 1e-8) << t;
        EXPECT_LT((lam * f.dB - dB).norm(), 1e-12) << t;
    }
}

// Confocal ellipse and hyperbola meet orthogonally, so H = -Id at a corner A of a and b; the
// resulting orbits starting at the corner do not return to it.
TEST(Consistency, ConfocalCornerOrbitsAreNotDegenerate) {
    ConfocalFamily f(1.0);
    Billiard bl = build_type3(f, 4.0, 0.5, Topotype::EllipseHyperbola);
    // corner: x^2/4 + y^2/3 = 1 and x^2/0.5 - y^2/0.5 = 1
    double x2 = (1.0 + 0.5 / 3.0) / (0.25 + 1.0 / 3.0), y2 = x2 - 0.5;
    Vec2c A(std::sqrt(x2), std::sqrt(y2));
    cplx tA = bl.mirrors[0].param_of(A, 0.5);
    ASSERT_LT((bl.mirrors[0].point(tA) - A).norm(), 1e-12);
    ProjLine ta = bl.mirrors[0].tangent_at_point(A), tb = bl.mirrors[1].tangent_at_point(A);
    EXPECT_LT(std::abs(bilinear_form(ta.direction(), tb.direction())), 1e-12);
    int closed = 0;
    for (double t2 : {-0.4, -0.2, 0.2, 0.4}) {
        Orbit o = extend_orbit(bl, tA, t2);
        if (!o.closed) continue;
        ++closed;
        EXPECT_GT((o.vertices[3].A - A).norm(), 1e-3) << t2;
    }
    EXPECT_GT(closed, 0);
}
