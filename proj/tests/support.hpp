// Shared helpers for the test suites: seeded random samplers and oracles that
// recompute library quantities by independent routes.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

#include "dec2d.hpp"

namespace dec2d::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

/// Uniform vertices in [0,1]^2, counter-clockwise, area >= min_area.
inline std::array<Point2, 3> random_triangle(Rng& g, double min_area = 1e-3)
{
    while (true) {
        std::array<Point2, 3> v{};
        for (auto& p : v) p = {uniform(g, 0, 1), uniform(g, 0, 1)};
        const double twice = orient(v[0], v[1], v[2]);
        if (std::abs(twice) / 2 < min_area) continue;
        if (twice < 0) std::swap(v[1], v[2]);
        return v;
    }
}

/// Interior angle at vertex `at` of the triangle.
inline double interior_angle(const Point2& at, const Point2& p, const Point2& q)
{
    const auto a = p - at;
    const auto b = q - at;
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

inline bool is_obtuse(const std::array<Point2, 3>& v)
{
    for (int i = 0; i < 3; ++i)
        if (interior_angle(v[i], v[(i + 1) % 3], v[(i + 2) % 3]) > std::numbers::pi / 2) return true;
    return false;
}

/// Counter-clockwise triangle with an obtuse angle at a random vertex.
inline std::array<Point2, 3> random_obtuse_triangle(Rng& g)
{
    // Apex above the base [0,1] inside the Thales circle gives an obtuse apex.
    const double t = uniform(g, 0.1, 0.9);
    const double h = uniform(g, 0.05, 0.95) * std::sqrt(t * (1 - t));
    std::array<Point2, 3> v{Point2{0, 0}, Point2{1, 0}, Point2{t, h}};
    const double phi = uniform(g, 0, 2 * std::numbers::pi);
    const double s = uniform(g, 0.2, 3.0);
    const Point2 shift{uniform(g, -2, 2), uniform(g, -2, 2)};
    for (auto& p : v) p = Point2{std::cos(phi) * p.x - std::sin(phi) * p.y, std::sin(phi) * p.x + std::cos(phi) * p.y} * s + shift;
    const int roll = static_cast<int>(g() % 3);
    return {v[roll], v[(roll + 1) % 3], v[(roll + 2) % 3]};
}

/// kx, ky log-uniform in [0.1, 100], angle uniform in [0, 360).
inline AnisotropyTensor<double> random_spd(Rng& g)
{
    const double kx = std::pow(10.0, uniform(g, -1, 2));
    const double ky = std::pow(10.0, uniform(g, -1, 2));
    return material_tensor(kx, ky, uniform(g, 0, 360));
}

/// Linear-element stiffness from the inverse Jacobian of the reference map.
inline Mat3<double> feml_stiffness_oracle(const std::array<Point2, 3>& v, const AnisotropyTensor<double>& K)
{
    // J = [v2-v1 | v3-v1]; grad(phi) = J^{-T} grad_ref(phi).
    const double j11 = v[1].x - v[0].x, j12 = v[2].x - v[0].x;
    const double j21 = v[1].y - v[0].y, j22 = v[2].y - v[0].y;
    const double det = j11 * j22 - j12 * j21;
    const std::array<Point2, 3> ref{Point2{-1, -1}, Point2{1, 0}, Point2{0, 1}};
    std::array<Point2, 3> grad{};
    for (int i = 0; i < 3; ++i) {
        grad[i] = {(j22 * ref[i].x - j21 * ref[i].y) / det, (-j12 * ref[i].x + j11 * ref[i].y) / det};
    }
    Mat3<double> m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = 0.5 * det * dot(grad[r], K.apply(grad[c]));
    return m;
}

/// (a, b) with target = a u + b v, by Cramer's rule.
inline std::pair<double, double> decompose(const Point2& target, const Point2& u, const Point2& v)
{
    const double d = u.x * v.y - u.y * v.x;
    return {(target.x * v.y - target.y * v.x) / d, (u.x * target.y - u.y * target.x) / d};
}

inline double det3(const std::array<std::array<double, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// det [a 1; b 1; c 1] with points as rows.
inline double det_rows(const Point2& a, const Point2& b, const Point2& c)
{
    return det3({{{a.x, a.y, 1}, {b.x, b.y, 1}, {c.x, c.y, 1}}});
}

inline double max_abs_diff(const Mat3<double>& a, const Mat3<double>& b)
{
    double m = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

inline double max_abs(const Mat3<double>& a)
{
    double m = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a(r, c)));
    return m;
}

inline const Point2 kSqrt3Apex{0.5, std::numbers::sqrt3 / 2};

} // namespace dec2d::testing
