/**
 * @file local_ops.hpp
 * @brief Element-level DEC operators and the matching linear FEM element.
 *
 * The local DEC system of a triangle is
 *
 *     D0^T * M1 * Kdec * D0 * f = M0 * q
 *
 * with D0 the edge-difference matrix, M1 = diag(l_i / L_i), M0 = diag(A_i) and
 * Kdec the action of the anisotropy tensor on edge values. Edge rows follow
 * the order ([v1 v2], [v2 v3], [v3 v1]).
 */
#pragma once

#include <array>
#include <concepts>
#include <cstdint>

#include "dec2d/geometry.hpp"

namespace dec2d {

/// Dense 3x3 matrix, row-major.
template <std::floating_point T>
struct Mat3 {
    std::array<std::array<T, 3>, 3> a{};

    constexpr T& operator()(int r, int c) noexcept { return a[r][c]; }
    constexpr const T& operator()(int r, int c) const noexcept { return a[r][c]; }

    static constexpr Mat3 diagonal(const std::array<T, 3>& d) noexcept
    {
        Mat3 m;
        for (int i = 0; i < 3; ++i) m(i, i) = d[i];
        return m;
    }

    [[nodiscard]] constexpr Mat3 transposed() const noexcept
    {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(c, r) = a[r][c];
        return t;
    }

    friend constexpr Mat3 operator*(const Mat3& x, const Mat3& y) noexcept
    {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                T s{};
                for (int k = 0; k < 3; ++k) s += x(r, k) * y(k, c);
                m(r, c) = s;
            }
        return m;
    }

    friend constexpr std::array<T, 3> operator*(const Mat3& x, const std::array<T, 3>& v) noexcept
    {
        std::array<T, 3> out{};
        for (int r = 0; r < 3; ++r) out[r] = x(r, 0) * v[0] + x(r, 1) * v[1] + x(r, 2) * v[2];
        return out;
    }

    friend constexpr Mat3 operator*(T s, Mat3 m) noexcept
    {
        for (auto& row : m.a)
            for (auto& e : row) e *= s;
        return m;
    }
};

/// Discrete exterior derivative on 0-forms: f -> (f2-f1, f3-f2, f1-f3).
template <std::floating_point T = double>
constexpr Mat3<T> d0() noexcept
{
    return Mat3<T>{{{{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}}}};
}

/// Edge Hodge star diag(l_i / L_i). Entries are signed.
template <std::floating_point T>
Mat3<T> hodge1(const TriangleGeometry<T>& g) noexcept
{
    return Mat3<T>::diagonal(g.length_ratio);
}

/// Vertex Hodge star diag(A_i). Entries are signed and sum to the area.
template <std::floating_point T>
Mat3<T> hodge0(const TriangleGeometry<T>& g) noexcept
{
    return Mat3<T>::diagonal(g.dual_area);
}

/**
 * Coefficients of K w_i = lambda_i w_{i+1} + mu_i w_{i+2} (indices mod 3)
 * for w1 = v2-v1, w2 = v3-v2, w3 = v1-v3.
 */
template <std::floating_point T>
struct AnisoCoeffs {
    std::array<T, 3> lambda{};
    std::array<T, 3> mu{};
};

template <std::floating_point T>
struct KDec {
    AnisoCoeffs<T> coeffs;
    Mat3<T> matrix;  ///< [[0, l1, m1], [m2, 0, l2], [l3, m3, 0]]
};

/**
 * Discretization of the pullback by K on primal 1-forms. The coefficients use
 * the closed rotation forms
 *
 *     lambda_i = -J(w_{i+2}) . K(w_i) / 2A,   mu_i = J(w_{i+1}) . K(w_i) / 2A
 */
template <std::floating_point T>
KDec<T> k_dec(const TriangleGeometry<T>& g, const AnisotropyTensor<T>& K) noexcept
{
    KDec<T> out;
    const T two_area = T(2) * g.area;
    for (int i = 0; i < 3; ++i) {
        const auto kw = K.apply(g.edge[i]);
        out.coeffs.lambda[i] = -dot(rotate90(g.edge[(i + 2) % 3]), kw) / two_area;
        out.coeffs.mu[i] = dot(rotate90(g.edge[(i + 1) % 3]), kw) / two_area;
    }
    const auto& l = out.coeffs.lambda;
    const auto& m = out.coeffs.mu;
    out.matrix = Mat3<T>{{{{0, l[0], m[0]}, {m[1], 0, l[1]}, {l[2], m[2], 0}}}};
    return out;
}

/**
 * Element-constant discrete gradient W with W . w_i = (D0 f)_i. Identical to
 * the gradient of the linear interpolant. Throws GeometryError for degenerate
 * triangles.
 */
template <std::floating_point T>
Vec2<T> flux(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3, const std::array<T, 3>& f)
{
    const T twice_area = orient(v1, v2, v3);
    detail::check_nondegenerate(twice_area, detail::max_edge_sq(v1, v2, v3));
    const T gx = (v2.y - v3.y) * f[0] + (v3.y - v1.y) * f[1] + (v1.y - v2.y) * f[2];
    const T gy = (v3.x - v2.x) * f[0] + (v1.x - v3.x) * f[1] + (v2.x - v1.x) * f[2];
    return {gx / twice_area, gy / twice_area};
}

/// Anisotropic flux W' = K W.
template <std::floating_point T>
Vec2<T> anisotropic_flux(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3,
                         const AnisotropyTensor<T>& K, const std::array<T, 3>& f)
{
    return K.apply(flux(v1, v2, v3, f));
}

enum class Method : std::uint8_t { dec, feml };

constexpr const char* to_string(Method m) noexcept { return m == Method::dec ? "dec" : "feml"; }

/// Element stiffness (vertex indexed) and load.
template <std::floating_point T>
struct LocalSystem {
    Mat3<T> stiffness;
    std::array<T, 3> load{};
    Method method{Method::dec};
};

/// D0^T M1 Kdec D0 with circumcentric load (A_1 q_1, A_2 q_2, A_3 q_3).
template <std::floating_point T>
LocalSystem<T> local_system_dec(const TriangleGeometry<T>& g, const AnisotropyTensor<T>& K,
                                const std::array<T, 3>& q_nodal) noexcept
{
    const auto D = d0<T>();
    LocalSystem<T> s;
    s.method = Method::dec;
    s.stiffness = D.transposed() * hodge1(g) * k_dec(g, K).matrix * D;
    for (int i = 0; i < 3; ++i) s.load[i] = g.dual_area[i] * q_nodal[i];
    return s;
}

/// Linear triangle: B^T K B A with barycentric load (A/3) q.
template <std::floating_point T>
LocalSystem<T> local_system_feml(const Vec2<T>& v1, const Vec2<T>& v2, const Vec2<T>& v3,
                                 const AnisotropyTensor<T>& K, const std::array<T, 3>& q_nodal)
{
    const T twice_area = orient(v1, v2, v3);
    detail::check_nondegenerate(twice_area, detail::max_edge_sq(v1, v2, v3));
    if (twice_area < 0) {
        throw GeometryError("clockwise triangle");
    }
    const T area = twice_area / T(2);
    // Columns of B scaled by 2A.
    const std::array<Vec2<T>, 3> b = {Vec2<T>{v2.y - v3.y, v3.x - v2.x},
                                      Vec2<T>{v3.y - v1.y, v1.x - v3.x},
                                      Vec2<T>{v1.y - v2.y, v2.x - v1.x}};
    LocalSystem<T> s;
    s.method = Method::feml;
    const T scale = T(1) / (T(4) * area);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s.stiffness(r, c) = scale * dot(b[r], K.apply(b[c]));
    for (int i = 0; i < 3; ++i) s.load[i] = area / T(3) * q_nodal[i];
    return s;
}

} // namespace dec2d
