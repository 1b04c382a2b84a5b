#include <gtest/gtest.h>

#include <random>

#include "cbill/projective.hpp"

using namespace cbill;

namespace {

std::mt19937_64 rng(20240611);

cplx rand_c(double s = 1.0) {
    std::normal_distribution<double> n(0.0, s);
    return {n(rng), n(rng)};
}
Vec2c rand_v() { return Vec2c(rand_c(), rand_c()); }

// oracle: symmetry about direction m built only from the bilinear form
Vec2c oracle_reflect(const Vec2c& x, const Vec2c& m) {
    return 2.0 * bilinear_form(x, m) / bilinear_form(m, m) * m - x;
}

} // namespace

TEST(BilinearForm, Values) {
    EXPECT_EQ(bilinear_form(Vec2c(1, 0), Vec2c(1, 0)), cplx(1.0));
    EXPECT_NEAR(std::abs(bilinear_form(Vec2c(1, kI), Vec2c(1, kI))), 0.0, 1e-15);
    EXPECT_EQ(bilinear_form(Vec2c(1, 2), Vec2c(3, 4)), cplx(11.0));
}

TEST(IsIsotropic, Examples) {
    EXPECT_TRUE(is_isotropic(ProjLine(0.0, kI, -1.0)));  // z2 = i z1
    EXPECT_TRUE(is_isotropic(ProjLine::infinity()));
    EXPECT_FALSE(is_isotropic(ProjLine(0.0, 0.0, 1.0)));  // x-axis
}

TEST(IsIsotropic, MatchesBilinearFormOnDirection) {
    for (int n = 0; n < 10000; ++n) {
        Vec3c c(rand_c(), rand_c(), rand_c());
        if (n % 3 == 0) c(2) = (n % 2 ? kI : -kI) * c(1);  // force through a cyclic point
        ProjLine l(c);
        Vec2c d = l.direction();
        bool form_zero = std::abs(bilinear_form(d, d)) <= kIsoTol * d.squaredNorm();
        ASSERT_EQ(is_isotropic(l), form_zero);
        ASSERT_EQ(is_isotropic(l), n % 3 == 0);
    }
}

TEST(ProjPoint, NormalizationIdempotentAndScaleFree) {
    for (int n = 0; n < 10000; ++n) {
        Vec3c h(rand_c(), rand_c(), rand_c());
        ProjPoint a(h);
        ProjPoint b(a.h);
        ASSERT_LT((a.h - b.h).norm(), 1e-15);
        cplx s = rand_c() + 0.1;
        ProjPoint c(s * h);
        bool by_coords = (a.h - c.h).norm() < 1e-10;
        ASSERT_EQ(by_coords, proj_equal(a, c));
        ASSERT_TRUE(by_coords);
        ProjPoint d(Vec3c(rand_c(), rand_c(), rand_c()));
        ASSERT_EQ((a.h - d.h).norm() < 1e-10, proj_equal(a, d));
    }
}

TEST(DirectionCoord, RealAnglesOnUnitCircle) {
    for (double th : {0.0, 0.3, 1.0, 2.5, -0.7}) {
        DirectionCoord z = DirectionCoord::of_vector(Vec2c(std::cos(th), std::sin(th)));
        EXPECT_NEAR(std::abs(z.value() - (-std::exp(2.0 * kI * th))), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(z.value()), 1.0, 1e-14);
    }
    EXPECT_TRUE(DirectionCoord::of_vector(Vec2c(1, kI)).is_isotropic());
    EXPECT_NEAR(std::abs(DirectionCoord::of_vector(Vec2c(1, kI)).value()), 0.0, 1e-15);
    EXPECT_TRUE(DirectionCoord::of_vector(Vec2c(1, -kI)).is_infinite());
    Vec2c v = rand_v();
    Vec2c w = DirectionCoord::of_vector(v).vector();
    EXPECT_NEAR(std::abs(det2(v, w)), 0.0, 1e-14 * v.norm() * w.norm());
}

TEST(ReflectDirection, Examples) {
    DirectionCoord zeta = DirectionCoord::finite(0.3 + 0.8 * kI);
    EXPECT_LT(chordal_distance(reflect_direction(zeta, zeta), zeta), 1e-15);
    DirectionCoord xaxis = DirectionCoord::of_angle(0.0);
    for (double th : {0.2, 1.1, -2.0}) {
        DirectionCoord r = reflect_direction(DirectionCoord::of_angle(th), xaxis);
        EXPECT_LT(chordal_distance(r, DirectionCoord::of_angle(-th)), 1e-14);
    }
    EXPECT_THROW(reflect_direction(zeta, DirectionCoord::finite(0.0)), GeometryError);
    EXPECT_THROW(reflect_direction(zeta, DirectionCoord(1.0, 0.0)), GeometryError);
}

TEST(ReflectDirection, MatchesMatrixOracle) {
    for (int n = 0; n < 10000; ++n) {
        Vec2c m = rand_v(), x = rand_v();
        DirectionCoord got = reflect_direction(DirectionCoord::of_vector(x), DirectionCoord::of_vector(m));
        DirectionCoord want = DirectionCoord::of_vector(oracle_reflect(x, m));
        ASSERT_LT(chordal_distance(got, want), 1e-12);
    }
}

TEST(ReflectDirection, Involution) {
    for (int n = 0; n < 10000; ++n) {
        DirectionCoord z = DirectionCoord::of_vector(rand_v());
        DirectionCoord m = DirectionCoord::of_vector(rand_v());
        ASSERT_LT(chordal_distance(reflect_direction(reflect_direction(z, m), m), z), 1e-12);
    }
}

TEST(ReflectDirection, RealAngleLaw) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int n = 0; n < 10000; ++n) {
        double th = u(rng), al = u(rng);
        DirectionCoord r = reflect_direction(DirectionCoord::of_angle(th), DirectionCoord::of_angle(al));
        ASSERT_LT(chordal_distance(r, DirectionCoord::of_angle(2 * al - th)), 1e-12);
    }
}

TEST(Symmetry, Examples) {
    ProjLine xaxis(0.0, 0.0, 1.0);
    Vec2c p = symmetry_about_line(Vec2c(0, 1), xaxis);
    EXPECT_LT((p - Vec2c(0, -1)).norm(), 1e-15);
    ProjLine l(0.0, 2.0, -1.0);  // z2 = 2 z1
    Vec2c q = symmetry_about_line(Vec2c(1, 0), l);
    EXPECT_LT((q - Vec2c(-0.6, 0.8)).norm(), 1e-15);
    Vec2c on(0.7 + 0.2 * kI, 1.4 + 0.4 * kI);
    EXPECT_LT((symmetry_about_line(on, l) - on).norm(), 1e-14);
    EXPECT_THROW(symmetry_about_line(on, ProjLine(0.0, kI, -1.0)), GeometryError);
}

TEST(Symmetry, InvolutionIsometryFixedSet) {
    for (int n = 0; n < 2000; ++n) {
        ProjLine l(Vec3c(rand_c(), rand_c(), rand_c()));
        Vec2c p = rand_v(), q = rand_v();
        Vec2c sp = symmetry_about_line(p, l), sq = symmetry_about_line(q, l);
        ASSERT_LT((symmetry_about_line(sp, l) - p).norm(), 1e-9 * (1 + p.norm()));
        cplx d0 = bilinear_form(q - p, q - p), d1 = bilinear_form(sq - sp, sq - sp);
        ASSERT_LT(std::abs(d1 - d0), 1e-10 * std::max(1.0, std::abs(d0)) * (1 + p.squaredNorm() + q.squaredNorm()));
        ASSERT_FALSE((sp - p).norm() < 1e-9);
        // a point of the line
        Vec2c d = l.direction();
        Vec2c base = std::abs(l.c(1)) > std::abs(l.c(2)) ? Vec2c(-l.c(0) / l.c(1), 0.0) : Vec2c(0.0, -l.c(0) / l.c(2));
        Vec2c on = base + rand_c() * d;
        ASSERT_LT((symmetry_about_line(on, l) - on).norm(), 1e-9 * (1 + on.norm()));
    }
}

TEST(Verdict, Branches) {
    ProjLine xaxis(0.0, 0.0, 1.0);
    auto v = reflection_law_verdict(ProjPoint::affine(-1, 1), ProjPoint::affine(0, 0), ProjPoint::affine(1, 1), xaxis, 1e-12);
    EXPECT_EQ(v.kind, VerdictKind::SymmetricNonisotropic);
    EXPECT_LT(v.residual, 1e-15);
    v = reflection_law_verdict(ProjPoint::affine(0, 0), ProjPoint::affine(0, 0), ProjPoint::affine(1, 1), xaxis, 1e-12);
    EXPECT_EQ(v.kind, VerdictKind::VertexCoincidence);
    ProjLine iso(0.0, kI, -1.0);
    v = reflection_law_verdict(ProjPoint::affine(-1, 1), ProjPoint::affine(0, 0), ProjPoint::affine(1, 1), iso, 1e-12);
    EXPECT_EQ(v.kind, VerdictKind::Violated);
    EXPECT_GT(v.residual, 0.1);
    // an edge lying on the isotropic mirror
    v = reflection_law_verdict(ProjPoint::affine(1, kI), ProjPoint::affine(0, 0), ProjPoint::affine(1, 3), iso, 1e-12);
    EXPECT_EQ(v.kind, VerdictKind::IsotropicEdgeOnMirror);
    EXPECT_EQ(v.residual, 0.0);
    v = reflection_law_verdict(ProjPoint::affine(-1, 1), ProjPoint::affine(0, 0), ProjPoint::affine(1, 2), xaxis, 1e-12);
    EXPECT_EQ(v.kind, VerdictKind::Violated);
}

TEST(Verdict, ResidualZeroIffNotViolatedOnRandomSymmetricTriples) {
    for (int n = 0; n < 2000; ++n) {
        Vec2c b = rand_v(), m = rand_v(), a = rand_v();
        ProjLine L = ProjLine::through(b, m);
        Vec2c c = b + rand_c() * oracle_reflect(a - b, m);
        auto v = reflection_law_verdict(ProjPoint::affine(a), ProjPoint::affine(b), ProjPoint::affine(c), L, 1e-9);
        ASSERT_TRUE(v.holds());
        ASSERT_LT(v.residual, 1e-9);
    }
}
