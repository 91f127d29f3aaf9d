/**
 * @file geometry.hpp
 * @brief Circumcentric dual geometry of a single triangle and the 2x2
 *        anisotropy tensor.
 *
 * Local vertex order is (v1, v2, v3); local edge order is
 * ([v1 v2], [v2 v3], [v3 v1]). All signed dual quantities are computed from
 * orientation determinants, so they stay valid when the circumcenter falls
 * outside the triangle: a dual length is negative when the circumcenter lies
 * on the far side of its primal edge.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <numbers>

#include "dec2d/error.hpp"

namespace dec2d {

template <std::floating_point T>
struct Vec2 {
    T x{};
    T y{};

    constexpr Vec2& operator+=(const Vec2& o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(T s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) noexcept { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, T s) noexcept { return a *= s; }
    friend constexpr Vec2 operator*(T s, Vec2 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

using Point2 = Vec2<double>;

template <std::floating_point T>
constexpr T dot(const Vec2<T>& a, const Vec2<T>& b) noexcept { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product; equals rotate90(a) . b.
template <std::floating_point T>
constexpr T cross(const Vec2<T>& a, const Vec2<T>& b) noexcept { return a.x * b.y - a.y * b.x; }

template <std::floating_point T>
T norm(const Vec2<T>& a) noexcept { return std::hypot(a.x, a.y); }

/// Counter-clockwise rotation by 90 degrees: (x, y) -> (-y, x).
template <std::floating_point T>
constexpr Vec2<T> rotate90(const Vec2<T>& v) noexcept { return {-v.y, v.x}; }

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
template <std::floating_point T>
constexpr T orient(const Vec2<T>& a, const Vec2<T>& b, const Vec2<T>& c) noexcept
{
    return cross(b - a, c - a);
}

template <std::floating_point T>
inline constexpr T kDegeneracyRatio = T(1e-14);

namespace detail {

template <std::floating_point T>
void check_nondegenerate(T twice_area, T max_edge_sq)
{
    if (!std::isfinite(twice_area) || std::abs(twice_area) * T(0.5) <= kDegeneracyRatio<T> * max_edge_sq) {
        throw GeometryError("degenerate triangle (area below tolerance)");
    }
}

template <std::floating_point T>
T max_edge_sq(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3)
{
    const auto a = v2 - v1;
    const auto b = v3 - v2;
    const auto c = v1 - v3;
    return std::max({dot(a, a), dot(b, b), dot(c, c)});
}

} // namespace detail

/// Circumcenter of a non-degenerate triangle; either orientation is accepted.
template <std::floating_point T>
Vec2<T> circumcenter(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3)
{
    const auto b = v2 - v1;
    const auto c = v3 - v1;
    const T d = T(2) * cross(b, c);
    detail::check_nondegenerate(d * T(0.5), detail::max_edge_sq(v1, v2, v3));
    const T bb = dot(b, b);
    const T cc = dot(c, c);
    return {v1.x + (c.y * bb - b.y * cc) / d, v1.y + (b.x * cc - c.x * bb) / d};
}

/**
 * @brief Per-triangle circumcentric quantities.
 *
 * Index i of the edge arrays refers to edge i = [v_i v_{i+1}]; index i of the
 * vertex arrays refers to vertex v_i.
 */
template <std::floating_point T>
struct TriangleGeometry {
    std::array<Vec2<T>, 3> vertex{};
    Vec2<T> circumcenter{};
    T area{};
    T circumradius{};
    std::array<Vec2<T>, 3> edge{};          ///< w1 = v2-v1, w2 = v3-v2, w3 = v1-v3
    std::array<T, 3> primal_length{};       ///< L_i = |w_i|
    std::array<T, 3> dual_length{};         ///< signed distance from edge midpoint to circumcenter
    std::array<T, 3> length_ratio{};        ///< l_i / L_i, the diagonal of the edge Hodge star
    std::array<T, 3> dual_area{};           ///< signed circumcentric area owned by each vertex
    std::array<T, 3> half_angle{};          ///< alpha_i = atan(2 l_i / L_i), may be negative
};

/**
 * Builds the circumcentric geometry of a counter-clockwise triangle.
 * Throws GeometryError when the triangle is degenerate or clockwise.
 */
template <std::floating_point T>
TriangleGeometry<T> triangle_geometry(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3)
{
    TriangleGeometry<T> g;
    g.vertex = {v1, v2, v3};
    g.edge = {v2 - v1, v3 - v2, v1 - v3};
    const T twice_area = cross(g.edge[0], g.edge[1]);
    detail::check_nondegenerate(twice_area, detail::max_edge_sq(v1, v2, v3));
    if (twice_area < 0) {
        throw GeometryError("clockwise triangle");
    }
    g.area = twice_area / T(2);
    g.circumcenter = circumcenter(v1, v2, v3);
    g.circumradius = norm(g.circumcenter - v1);

    // orient(v_i, v_{i+1}, c) = L_i * l_i.
    std::array<T, 3> wedge{};
    for (int i = 0; i < 3; ++i) {
        const auto& a = g.vertex[i];
        const auto& b = g.vertex[(i + 1) % 3];
        wedge[i] = orient(a, b, g.circumcenter);
        const T len_sq = dot(g.edge[i], g.edge[i]);
        g.primal_length[i] = std::sqrt(len_sq);
        g.length_ratio[i] = wedge[i] / len_sq;
        g.dual_length[i] = wedge[i] / g.primal_length[i];
        g.half_angle[i] = std::atan(T(2) * g.length_ratio[i]);
    }
    // Vertex v_i owns half of each incident edge's (midpoint, circumcenter) wedge.
    g.dual_area = {(wedge[0] + wedge[2]) / T(4), (wedge[0] + wedge[1]) / T(4), (wedge[1] + wedge[2]) / T(4)};
    return g;
}

/// Symmetric 2x2 anisotropy tensor [[k11, k12], [k12, k22]].
template <std::floating_point T>
struct AnisotropyTensor {
    T k11{};
    T k12{};
    T k22{};

    [[nodiscard]] constexpr Vec2<T> apply(const Vec2<T>& v) const noexcept
    {
        return {k11 * v.x + k12 * v.y, k12 * v.x + k22 * v.y};
    }
    [[nodiscard]] constexpr T trace() const noexcept { return k11 + k22; }
    [[nodiscard]] constexpr T determinant() const noexcept { return k11 * k22 - k12 * k12; }

    static constexpr AnisotropyTensor isotropic(T k) noexcept { return {k, T(0), k}; }

    friend constexpr bool operator==(const AnisotropyTensor&, const AnisotropyTensor&) = default;
};

/**
 * K = R(angle) diag(kx, ky) R(angle)^T, angle in degrees counter-clockwise
 * from +x. The kx principal direction is at `angle_deg`.
 */
template <std::floating_point T>
AnisotropyTensor<T> material_tensor(T kx, T ky, T angle_deg)
{
    if (!(kx > 0) || !(ky > 0) || !std::isfinite(kx) || !std::isfinite(ky)) {
        throw ValidationError("principal diffusivities must be positive and finite");
    }
    if (!std::isfinite(angle_deg)) {
        throw ValidationError("material angle must be finite");
    }
    const T theta = angle_deg * std::numbers::pi_v<T> / T(180);
    const T c = std::cos(theta);
    const T s = std::sin(theta);
    const T diff = kx - ky;
    // Written around ky so the isotropic case is exact.
    return {ky + diff * c * c, diff * c * s, kx - diff * c * c};
}

} // namespace dec2d
