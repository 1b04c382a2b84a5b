#pragma once

// Seeded random generators for the acceptance battery. All draws go through Rng so that a seed
// determines every sample.

#include <random>
#include <vector>

#include "cbill/birkhoff.hpp"
#include "cbill/real_billiards.hpp"
#include "cbill/triangular_fields.hpp"

namespace cbill::sampling {

using Rng = std::mt19937_64;

// uniform_real_distribution is implementation-defined; this keeps outputs identical across standard libraries
inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

inline double normal(Rng& rng) {
    double u1 = uniform(rng, 0.0, 1.0), u2 = uniform(rng, 0.0, 1.0);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
}

inline cplx gaussian_cplx(Rng& rng) {
    double a = normal(rng);
    return {a, normal(rng)};
}

inline Vec2c gaussian_vec(Rng& rng) {
    cplx a = gaussian_cplx(rng);
    return {a, gaussian_cplx(rng)};
}

inline Mirror random_mirror(Rng& rng) {
    switch (rng() % 3) {
    case 0: {
        double x = uniform(rng, -2, 2), y = uniform(rng, -2, 2), a = uniform(rng, 0, kPi);
        return Mirror::line(Vec2c(x, y), Vec2c(std::cos(a), std::sin(a)));
    }
    case 1: {
        double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1);
        return Mirror::circle(Vec2c(x, y), uniform(rng, 0.5, 4.0));
    }
    default: {
        double c = uniform(rng, 0.5, 1.5), a = uniform(rng, 0, kPi), ox = uniform(rng, -1, 1), oy = uniform(rng, -1, 1);
        ConfocalFamily f(c, Frame{a, ox, oy});
        return conic_at(f, c * c + uniform(rng, 0.3, 3.0));
    }
    }
}

// random complex k-gon framed by a random choice of symmetry line at each vertex
inline FramedKGon random_framed_kgon(Rng& rng, int k) {
    std::vector<Vec2c> pts;
    for (int j = 0; j < k; ++j) {
        double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2), c = uniform(rng, -2, 2), d = uniform(rng, -2, 2);
        pts.push_back(Vec2c(cplx(a, b), cplx(c, d)));
    }
    FramedKGon g;
    for (int j = 0; j < k; ++j) {
        const Vec2c& A = pts[std::size_t(j)];
        auto c = detail::bisector_units(A, pts[std::size_t((j + k - 1) % k)], pts[std::size_t((j + 1) % k)]);
        g.vertices.push_back({A, ProjLine::through(A, c[rng() % 2])});
    }
    return g;
}

inline std::vector<Vec2c> random_real_points(Rng& rng, int k) {
    std::vector<Vec2c> pts;
    for (int j = 0; j < k; ++j) {
        double x = uniform(rng, -2, 2);
        pts.push_back(Vec2c(x, uniform(rng, -2, 2)));
    }
    return pts;
}

inline std::vector<OrientedLine> random_lines(Rng& rng, int n, double pmax) {
    std::vector<OrientedLine> out;
    for (int i = 0; i < n; ++i) {
        double phi = uniform(rng, 0, 2 * kPi);
        out.emplace_back(phi, uniform(rng, -pmax, pmax));
    }
    return out;
}

// real framed triangle with A = 0 and C on H(AB) at a random signed ratio
inline FramedTriangleState random_spiral_start(Rng& rng, bool extB, bool extC) {
    Vec2c A(0.0, 0.0);
    Mat2c H = rotation(cplx(uniform(rng, 0.4, 2.6)));
    double r = uniform(rng, 0.8, 1.5), th = uniform(rng, 0, 2 * kPi);
    Vec2c B(r * std::cos(th), r * std::sin(th));
    Vec2c C = uniform(rng, 0.6, 1.6) * (H * B);
    return frame_triangle(A, H, B, C, bisector_hint(B, A, C, extB), bisector_hint(C, A, B, extC));
}

// Germ chain that l0 hits transversally, one reflector per law: circles, lines and rotated ellipses.
inline std::vector<Reflector> random_reflector_chain(Rng& rng, const OrientedLine& l0, const std::vector<Law>& laws) {
    std::vector<Reflector> out;
    OrientedLine cur = l0;
    Vec2d x = l0.point();
    for (Law law : laws) {
        Vec2d d = cur.direction();
        Vec2d X = x + uniform(rng, 1.0, 3.0) * d;
        while (true) {
            Mirror m = Mirror::line(X.cast<cplx>(), Vec2c(1.0, 0.0));
            double t = 0.0;
            switch (rng() % 3) {
            case 0: {
                double a = uniform(rng, 0, 2 * kPi), r = uniform(rng, 0.5, 3.0);
                Vec2d c = X - r * Vec2d(std::cos(a), std::sin(a));
                m = Mirror::circle(c.cast<cplx>(), r * r);
                t = a;
                break;
            }
            case 1: {
                double a = uniform(rng, 0, 2 * kPi);
                m = Mirror::line(X.cast<cplx>(), Vec2c(std::cos(a), std::sin(a)));
                break;
            }
            default: {
                double c = uniform(rng, 0.5, 1.5), a = uniform(rng, 0, 2 * kPi);
                ConfocalFamily f(c, Frame{a, 0.0, 0.0});
                cplx lambda = c * c + uniform(rng, 0.5, 3.0);
                t = uniform(rng, 0, 2 * kPi);
                Vec2d off = X - conic_at(f, lambda).point(t).real();
                f.frame.ox = off(0);
                f.frame.oy = off(1);
                m = conic_at(f, lambda);
            }
            }
            Vec2d T = m.derivative(t).real().normalized();
            if (std::abs(cross2(d, T)) < 0.3) continue;
            out.push_back({m, t, law});
            cur = OrientedLine::through(X, detail::apply_law(d, T, law));
            x = X;
            break;
        }
    }
    return out;
}

inline std::vector<Law> random_laws(Rng& rng, int k) {
    std::vector<Law> laws;
    for (int i = 0; i < k; ++i) laws.push_back(rng() % 2 ? Law::Skew : Law::Usual);
    return laws;
}

} // namespace cbill::sampling
