/**
 * @file system.hpp
 * @brief Global assembly, Dirichlet elimination and linear solvers.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dec2d/error.hpp"
#include "dec2d/local_ops.hpp"
#include "dec2d/mesh.hpp"

namespace dec2d {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/**
 * Square sparse matrix in compressed row form with sorted columns. The full
 * (not half) pattern is stored and every diagonal entry is present, possibly
 * as an explicit zero.
 */
class SparseSym {
public:
    SparseSym() = default;

    /// Compresses triplets, summing duplicates in input order.
    static SparseSym from_triplets(std::size_t n, std::span<const Triplet> triplets)
    {
        SparseSym m;
        m.n_ = n;
        std::vector<std::size_t> count(n, 1);  // diagonal
        for (const auto& t : triplets) {
            if (t.row >= n || t.col >= n) throw ValidationError("triplet index out of range");
            if (t.row != t.col) ++count[t.row];
        }
        m.row_ptr_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + count[i];

        // Bucket by row, then sort and merge each row.
        std::vector<std::size_t> cols(m.row_ptr_[n]);
        std::vector<double> vals(m.row_ptr_[n]);
        std::vector<std::size_t> fill(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            cols[fill[i]] = i;
            vals[fill[i]] = 0.0;
            ++fill[i];
        }
        for (const auto& t : triplets) {
            if (t.row == t.col) {
                vals[m.row_ptr_[t.row]] += t.value;
            } else {
                cols[fill[t.row]] = t.col;
                vals[fill[t.row]] = t.value;
                ++fill[t.row];
            }
        }
        m.col_.reserve(cols.size());
        m.val_.reserve(vals.size());
        std::vector<std::size_t> order;
        std::vector<std::size_t> new_ptr(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto b = m.row_ptr_[i], e = m.row_ptr_[i + 1];
            order.resize(e - b);
            std::iota(order.begin(), order.end(), b);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return cols[x] < cols[y]; });
            for (std::size_t k = 0; k < order.size(); ++k) {
                const auto idx = order[k];
                if (!m.col_.empty() && m.col_.size() > new_ptr[i] && m.col_.back() == cols[idx]) {
                    m.val_.back() += vals[idx];
                } else {
                    m.col_.push_back(cols[idx]);
                    m.val_.push_back(vals[idx]);
                }
            }
            new_ptr[i + 1] = m.col_.size();
        }
        m.row_ptr_ = std::move(new_ptr);
        return m;
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return col_.size(); }
    [[nodiscard]] std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const std::size_t> cols() const noexcept { return col_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return val_; }
    [[nodiscard]] std::span<double> values() noexcept { return val_; }

    /// Entry (i, j); zero when outside the pattern.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const
    {
        const auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        const auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        const auto it = std::lower_bound(b, e, j);
        return (it != e && *it == j) ? val_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
    }

    [[nodiscard]] bool has_entry(std::size_t i, std::size_t j) const
    {
        const auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        const auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        return std::binary_search(b, e, j);
    }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
            y[i] = s;
        }
    }

    [[nodiscard]] std::vector<double> diagonal() const
    {
        std::vector<double> d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
        return d;
    }

    [[nodiscard]] double max_abs() const noexcept
    {
        double m = 0.0;
        for (double v : val_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_{0};
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_;
    std::vector<double> val_;
};

struct LinearSystem {
    SparseSym matrix;
    std::vector<double> rhs;
    DirichletSet fixed;
};

/// Worker count: hardware concurrency capped by DEC2D_THREADS when set.
inline unsigned thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DEC2D_THREADS")) {
        if (const auto v = text::parse_int(env); v && *v >= 1) n = std::min(n, static_cast<unsigned>(*v));
    }
    return n;
}

/// Local system of element `t` for the requested method.
inline LocalSystem<double> element_system(const TriMesh& mesh, std::size_t t, const MaterialTable& materials,
                                          Method method)
{
    const auto& tri = mesh.triangles()[t];
    const auto& mat = materials.at(tri.material);
    const auto K = mat.tensor();
    const std::array<double, 3> q{mat.q, mat.q, mat.q};
    const auto v = mesh.corners(t);
    if (method == Method::dec) return local_system_dec(triangle_geometry(v[0], v[1], v[2]), K, q);
    return local_system_feml(v[0], v[1], v[2], K, q);
}

/**
 * Scatters every element system into a global matrix and load. Element
 * systems may be built in parallel; the scatter is serial in element order,
 * so results do not depend on the thread count. No boundary conditions are
 * applied.
 */
inline LinearSystem assemble(const TriMesh& mesh, const MaterialTable& materials, Method method,
                             unsigned threads = thread_count())
{
    validate_materials(mesh, materials);
    const auto nt = mesh.triangle_count();
    std::vector<LocalSystem<double>> local(nt);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, nt / 256))));
    if (threads == 1) {
        for (std::size_t t = 0; t < nt; ++t) local[t] = element_system(mesh, t, materials, method);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const auto chunk = (nt + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    const auto b = w * chunk, e = std::min(nt, b + chunk);
                    for (auto t = b; t < e; ++t) local[t] = element_system(mesh, t, materials, method);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<Triplet> trip;
    trip.reserve(9 * nt);
    LinearSystem sys;
    sys.rhs.assign(mesh.node_count(), 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& nodes = mesh.triangles()[t].nodes;
        for (int r = 0; r < 3; ++r) {
            sys.rhs[nodes[r]] += local[t].load[r];
            for (int c = 0; c < 3; ++c) trip.push_back({nodes[r], nodes[c], local[t].stiffness(r, c)});
        }
    }
    sys.matrix = SparseSym::from_triplets(mesh.node_count(), trip);
    return sys;
}

/**
 * Symmetric elimination of the fixed values in `sys.fixed`: fixed rows and
 * columns become identity rows/columns and free right-hand sides absorb the
 * known column contributions.
 */
inline LinearSystem apply_dirichlet(LinearSystem sys)
{
    if (sys.fixed.empty()) throw SingularSystemError("no Dirichlet nodes: the diffusion matrix is singular");
    const auto n = sys.matrix.size();
    std::vector<char> is_fixed(n, 0);
    std::vector<double> g(n, 0.0);
    for (const auto& [node, value] : sys.fixed) {
        if (node >= n) throw ValidationError("dirichlet node " + std::to_string(node) + " out of range");
        is_fixed[node] = 1;
        g[node] = value;
    }
    const auto ptr = sys.matrix.row_ptr();
    const auto col = sys.matrix.cols();
    auto val = sys.matrix.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (auto k = ptr[i]; k < ptr[i + 1]; ++k) {
            const auto j = col[k];
            if (is_fixed[i]) {
                val[k] = (i == j) ? 1.0 : 0.0;
            } else if (is_fixed[j]) {
                sys.rhs[i] -= val[k] * g[j];
                val[k] = 0.0;
            }
        }
        if (is_fixed[i]) sys.rhs[i] = g[i];
    }
    return sys;
}

struct SolveStats {
    std::size_t iterations{0};
    double final_residual{0.0};  ///< true residual ||b - A x|| / ||b||
    bool converged{false};
};

struct SolveResult {
    std::vector<double> solution;
    SolveStats stats;
};

inline constexpr double kDefaultTolerance = 1e-10;

namespace detail {

inline double norm2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void check_finite(double v, const char* what)
{
    if (!std::isfinite(v)) throw NumericalBreakdown(std::string("non-finite ") + what + " in conjugate gradient");
}

} // namespace detail

/**
 * Jacobi-preconditioned conjugate gradient. Stops when
 * ||b - A x||_2 <= tol * ||b||_2 or after max_iter iterations
 * (0 selects 10 n). The recursive residual is confirmed against the true
 * residual before reporting convergence.
 */
inline SolveResult solve_cg(const LinearSystem& sys, double tol = kDefaultTolerance, std::size_t max_iter = 0)
{
    const auto& A = sys.matrix;
    const auto n = A.size();
    if (sys.rhs.size() != n) throw ValidationError("rhs size does not match matrix");
    if (max_iter == 0) max_iter = 10 * std::max<std::size_t>(n, 1);

    SolveResult out;
    out.solution.assign(n, 0.0);
    auto& x = out.solution;
    const double bnorm = detail::norm2(sys.rhs);
    detail::check_finite(bnorm, "right-hand side");
    const double target = tol * bnorm;
    if (bnorm == 0.0) {
        out.stats.converged = true;
        return out;
    }

    auto inv_diag = A.diagonal();
    for (auto& d : inv_diag) {
        detail::check_finite(d, "diagonal");
        if (d <= 0.0) throw NumericalBreakdown("non-positive diagonal entry; matrix is not SPD");
        d = 1.0 / d;
    }

    std::vector<double> r = sys.rhs, z(n), p(n), Ap(n);
    auto precondition = [&] {
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    };
    auto true_residual = [&] {
        A.multiply(x, Ap);
        for (std::size_t i = 0; i < n; ++i) r[i] = sys.rhs[i] - Ap[i];
        return detail::norm2(r);
    };

    precondition();
    p = z;
    double rz = detail::dot(r, z);
    double rnorm = bnorm;
    std::size_t it = 0;
    while (it < max_iter) {
        A.multiply(p, Ap);
        const double pAp = detail::dot(p, Ap);
        detail::check_finite(pAp, "curvature");
        if (pAp <= 0.0) throw NumericalBreakdown("non-positive curvature; matrix is not SPD");
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        ++it;
        rnorm = detail::norm2(r);
        detail::check_finite(rnorm, "residual");
        if (rnorm <= target) {
            rnorm = true_residual();
            if (rnorm <= target) break;
            // Drifted: restart from the true residual.
            precondition();
            p = z;
            rz = detail::dot(r, z);
            continue;
        }
        precondition();
        const double rz_next = detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (it == max_iter) rnorm = true_residual();
    out.stats.iterations = it;
    out.stats.final_residual = rnorm / bnorm;
    out.stats.converged = rnorm <= target;
    return out;
}

inline constexpr std::size_t kDenseSolveLimit = 500;

/// Gaussian elimination with partial pivoting. Oracle for small systems.
inline std::vector<double> solve_dense(const LinearSystem& sys)
{
    const auto n = sys.matrix.size();
    if (n > kDenseSolveLimit) throw ValidationError("dense solve limited to n <= 500");
    if (sys.rhs.size() != n) throw ValidationError("rhs size does not match matrix");
    std::vector<double> a(n * n, 0.0);
    const auto ptr = sys.matrix.row_ptr();
    const auto col = sys.matrix.cols();
    const auto val = sys.matrix.values();
    for (std::size_t i = 0; i < n; ++i)
        for (auto k = ptr[i]; k < ptr[i + 1]; ++k) a[i * n + col[k]] = val[k];
    std::vector<double> b = sys.rhs;
    const double scale = std::max(sys.matrix.max_abs(), 1e-300);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        if (std::abs(a[piv * n + k]) <= 1e-14 * scale) throw SingularSystemError("singular matrix in dense solve");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
        x[k] = s / a[k * n + k];
    }
    return x;
}

} // namespace dec2d
