#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "support.hpp"

using namespace dec2d;
using namespace dec2d::testing;

namespace {

MaterialTable iso(double k, double q, int id = 0) { return {{id, Material{id, k, k, 0.0, q}}}; }

/// Random perturbation of interior nodes of a square grid; boundary stays put.
TriMesh jittered_square(int n, Rng& g, double amount = 0.3)
{
    const auto base = gen_square(n, 1.0);
    auto pts = base.points();
    const double h = 1.0 / n;
    for (NodeIndex i = 0; i < pts.size(); ++i) {
        if (base.is_boundary(i)) continue;
        pts[i] += Point2{uniform(g, -amount, amount) * h, uniform(g, -amount, amount) * h};
    }
    return {std::move(pts), base.triangles()};
}

LinearSystem dense_to_system(const std::vector<std::vector<double>>& a, std::vector<double> b)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
    return {SparseSym::from_triplets(a.size(), t), std::move(b), {}};
}

TEST(SparseSym, SumsDuplicatesAndStoresDiagonal)
{
    const std::vector<Triplet> t{{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {2, 2, 4.0}};
    const auto m = SparseSym::from_triplets(3, t);
    EXPECT_EQ(m.at(0, 1), 3.0);
    EXPECT_EQ(m.at(1, 0), 3.0);
    EXPECT_EQ(m.at(2, 2), 4.0);
    EXPECT_TRUE(m.has_entry(0, 0));
    EXPECT_TRUE(m.has_entry(1, 1));
    EXPECT_FALSE(m.has_entry(0, 2));
    EXPECT_EQ(m.at(0, 2), 0.0);
    EXPECT_EQ(m.nonzeros(), 5u);
}

TEST(Assemble, TwoTriangleSquare)
{
    const auto mesh = gen_square(1, 1.0);
    const auto sys = assemble(mesh, iso(1.0, 0.0), Method::dec);
    ASSERT_EQ(sys.matrix.size(), 4u);
    std::vector<double> ones(4, 1.0), out(4);
    sys.matrix.multiply(ones, out);
    for (double v : out) EXPECT_NEAR(v, 0.0, 1e-14);
    EXPECT_TRUE(sys.fixed.empty());
}

TEST(Assemble, DecAndFemlShareMatrixNotRhs)
{
    Rng g(21);
    const auto mesh = jittered_square(6, g);
    const MaterialTable mats{{0, Material{0, 3.0, 0.5, 40.0, 2.0}}};
    const auto dec = assemble(mesh, mats, Method::dec);
    const auto fem = assemble(mesh, mats, Method::feml);
    ASSERT_EQ(dec.matrix.nonzeros(), fem.matrix.nonzeros());
    const double scale = dec.matrix.max_abs();
    for (std::size_t k = 0; k < dec.matrix.nonzeros(); ++k) {
        EXPECT_EQ(dec.matrix.cols()[k], fem.matrix.cols()[k]);
        EXPECT_NEAR(dec.matrix.values()[k], fem.matrix.values()[k], 1e-10 * scale);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < dec.rhs.size(); ++i) diff = std::max(diff, std::abs(dec.rhs[i] - fem.rhs[i]));
    EXPECT_GT(diff, 1e-6);
}

TEST(Assemble, UnitSourceIntegratesToArea)
{
    Rng g(22);
    const std::vector<TriMesh> meshes{jittered_square(5, g), gen_disk(4, 1.3), gen_egg(1)};
    for (const auto& mesh : meshes) {
        MaterialTable mats;
        for (int id : mesh.material_ids()) mats[id] = Material{id, 2.0, 1.0, 10.0, 1.0};
        for (auto method : {Method::dec, Method::feml}) {
            const auto sys = assemble(mesh, mats, method);
            const double total = std::accumulate(sys.rhs.begin(), sys.rhs.end(), 0.0);
            EXPECT_NEAR(total, mesh.total_area(), 1e-12 * mesh.total_area());
        }
    }
}

TEST(Assemble, MissingMaterial)
{
    EXPECT_THROW(assemble(gen_square(2, 1.0), iso(1.0, 0.0, 5), Method::dec), ValidationError);
}

TEST(Assemble, OrderIndependent)
{
    Rng g(23);
    const auto mesh = jittered_square(7, g);
    auto tris = mesh.triangles();
    std::shuffle(tris.begin(), tris.end(), g);
    const TriMesh shuffled(mesh.points(), tris);
    const MaterialTable mats{{0, Material{0, 5.0, 0.2, 75.0, 1.0}}};
    const auto a = assemble(mesh, mats, Method::dec);
    const auto b = assemble(shuffled, mats, Method::dec);
    ASSERT_EQ(a.matrix.nonzeros(), b.matrix.nonzeros());
    const double scale = a.matrix.max_abs();
    for (std::size_t k = 0; k < a.matrix.nonzeros(); ++k) {
        EXPECT_NEAR(a.matrix.values()[k], b.matrix.values()[k], 1e-13 * scale);
    }
}

TEST(Assemble, ThreadCountDoesNotChangeResult)
{
    const auto mesh = refine(gen_disk(10, 1.0));
    const MaterialTable mats{{0, Material{0, 1.5, 1.0, 30.0, 1.0}}};
    const auto a = assemble(mesh, mats, Method::dec, 1);
    const auto b = assemble(mesh, mats, Method::dec, 4);
    ASSERT_EQ(a.matrix.nonzeros(), b.matrix.nonzeros());
    for (std::size_t k = 0; k < a.matrix.nonzeros(); ++k) EXPECT_EQ(a.matrix.values()[k], b.matrix.values()[k]);
    EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assemble, PatternIsNodeAdjacency)
{
    const auto mesh = gen_disk(3, 1.0);
    const auto sys = assemble(mesh, iso(1.0, 0.0), Method::feml);
    std::set<std::pair<NodeIndex, NodeIndex>> expected;
    for (NodeIndex i = 0; i < mesh.node_count(); ++i) expected.insert({i, i});
    for (const auto& e : mesh.edges()) {
        expected.insert({e.nodes[0], e.nodes[1]});
        expected.insert({e.nodes[1], e.nodes[0]});
    }
    std::set<std::pair<NodeIndex, NodeIndex>> got;
    for (std::size_t i = 0; i < sys.matrix.size(); ++i)
        for (auto k = sys.matrix.row_ptr()[i]; k < sys.matrix.row_ptr()[i + 1]; ++k) got.insert({i, sys.matrix.cols()[k]});
    EXPECT_EQ(got, expected);
}

TEST(Dirichlet, HandElimination)
{
    auto sys = dense_to_system({{2, -1}, {-1, 2}}, {1.0, 0.0});
    sys.fixed = {{1, 3.0}};
    const auto red = apply_dirichlet(sys);
    EXPECT_EQ(red.matrix.at(0, 0), 2.0);
    EXPECT_EQ(red.matrix.at(0, 1), 0.0);
    EXPECT_EQ(red.matrix.at(1, 0), 0.0);
    EXPECT_EQ(red.matrix.at(1, 1), 1.0);
    EXPECT_EQ(red.rhs[0], 1.0 + 3.0);
    EXPECT_EQ(red.rhs[1], 3.0);
    const auto x = solve_dense(red);
    EXPECT_NEAR(x[0], 2.0, 1e-15);
    EXPECT_NEAR(x[1], 3.0, 1e-15);
}

TEST(Dirichlet, AllFixedGivesIdentity)
{
    const auto mesh = gen_square(1, 1.0);
    auto sys = assemble(mesh, iso(1.0, 1.0), Method::dec);
    sys.fixed = {{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, 4.0}};
    const auto red = apply_dirichlet(sys);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(red.matrix.at(i, j), i == j ? 1.0 : 0.0);
    EXPECT_EQ(red.rhs, (std::vector<double>{1, 2, 3, 4}));
}

TEST(Dirichlet, EmptySetIsSingular)
{
    EXPECT_THROW(apply_dirichlet(assemble(gen_square(1, 1.0), iso(1.0, 1.0), Method::dec)), SingularSystemError);
}

TEST(Dirichlet, PreservesSymmetry)
{
    Rng g(24);
    const auto mesh = jittered_square(5, g);
    auto sys = assemble(mesh, {{0, Material{0, 4.0, 1.0, 20.0, 1.0}}}, Method::dec);
    sys.fixed = boundary_dirichlet(mesh, 2.0);
    const auto red = apply_dirichlet(sys);
    for (std::size_t i = 0; i < red.matrix.size(); ++i)
        for (std::size_t j = 0; j < red.matrix.size(); ++j)
            EXPECT_NEAR(red.matrix.at(i, j), red.matrix.at(j, i), 1e-14 * red.matrix.max_abs());
}

TEST(SolveCg, IdentityOneIteration)
{
    const auto sys = dense_to_system({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1.0, -2.0, 3.5});
    const auto r = solve_cg(sys);
    EXPECT_TRUE(r.stats.converged);
    EXPECT_EQ(r.stats.iterations, 1u);
    EXPECT_EQ(r.solution, sys.rhs);
}

TEST(SolveCg, ZeroRhs)
{
    const auto r = solve_cg(dense_to_system({{2, 1}, {1, 2}}, {0.0, 0.0}));
    EXPECT_TRUE(r.stats.converged);
    EXPECT_EQ(r.stats.iterations, 0u);
    EXPECT_EQ(r.solution, (std::vector<double>{0, 0}));
}

TEST(SolveCg, RandomSpdMatchesDense)
{
    Rng g(25);
    for (int trial = 0; trial < 5; ++trial) {
        // A = B^T B + I.
        const int n = 10;
        std::vector<std::vector<double>> b(n, std::vector<double>(n)), a(n, std::vector<double>(n));
        for (auto& row : b)
            for (auto& v : row) v = uniform(g, -1, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = i == j ? 1.0 : 0.0;
                for (int k = 0; k < n; ++k) s += b[k][i] * b[k][j];
                a[i][j] = s;
            }
        std::vector<double> rhs(n);
        for (auto& v : rhs) v = uniform(g, -1, 1);
        const auto sys = dense_to_system(a, rhs);
        const auto cg = solve_cg(sys, 1e-13);
        const auto dense = solve_dense(sys);
        ASSERT_TRUE(cg.stats.converged);
        const double scale = *std::max_element(dense.begin(), dense.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        for (int i = 0; i < n; ++i) EXPECT_NEAR(cg.solution[i], dense[i], 1e-8 * std::abs(scale));
    }
}

TEST(SolveCg, DiskExampleConvergesWithinFiveN)
{
    const auto mesh = gen_disk(8, 1.0);
    auto sys = assemble(mesh, {{0, Material{0, 1.5, 1.0, 30.0, 1.0}}}, Method::dec);
    sys.fixed = boundary_dirichlet(mesh, 10.0);
    const auto red = apply_dirichlet(sys);
    const auto r = solve_cg(red);
    EXPECT_TRUE(r.stats.converged);
    EXPECT_LE(r.stats.final_residual, 1e-10);
    EXPECT_LE(r.stats.iterations, 5 * mesh.node_count());
    // Independent residual check.
    std::vector<double> ax(red.rhs.size());
    red.matrix.multiply(r.solution, ax);
    double rn = 0, bn = 0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        rn += (red.rhs[i] - ax[i]) * (red.rhs[i] - ax[i]);
        bn += red.rhs[i] * red.rhs[i];
    }
    EXPECT_LE(std::sqrt(rn), 1e-10 * std::sqrt(bn));
}

TEST(SolveCg, AssembledSystemsMatchDense)
{
    Rng g(26);
    for (int trial = 0; trial < 4; ++trial) {
        const auto mesh = jittered_square(6, g);  // 49 nodes
        auto sys = assemble(mesh, {{0, Material{0, uniform(g, 0.5, 5), uniform(g, 0.5, 5), uniform(g, 0, 180), 1.0}}},
                            trial % 2 ? Method::dec : Method::feml);
        sys.fixed = boundary_dirichlet(mesh, uniform(g, -1, 1));
        const auto red = apply_dirichlet(sys);
        const auto cg = solve_cg(red, 1e-13);
        const auto dense = solve_dense(red);
        double scale = 0;
        for (double v : dense) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < dense.size(); ++i) EXPECT_NEAR(cg.solution[i], dense[i], 1e-8 * scale);
    }
}

TEST(SolveCg, MaxIterationsReportsNotConverged)
{
    const auto mesh = gen_disk(6, 1.0);
    auto sys = assemble(mesh, iso(1.0, 1.0), Method::dec);
    sys.fixed = boundary_dirichlet(mesh, 0.0);
    const auto r = solve_cg(apply_dirichlet(sys), 1e-12, 3);
    EXPECT_FALSE(r.stats.converged);
    EXPECT_EQ(r.stats.iterations, 3u);
    EXPECT_GT(r.stats.final_residual, 1e-12);
}

TEST(SolveCg, BreakdownOnNonFiniteOrIndefinite)
{
    EXPECT_THROW(solve_cg(dense_to_system({{1, 0}, {0, 1}}, {std::nan(""), 1.0})), NumericalBreakdown);
    EXPECT_THROW(solve_cg(dense_to_system({{-1, 0}, {0, 1}}, {1.0, 1.0})), NumericalBreakdown);
    EXPECT_THROW(solve_cg(dense_to_system({{1, 2}, {2, 1}}, {1.0, -1.0})), NumericalBreakdown);
}

TEST(SolveDense, Examples)
{
    const auto id = solve_dense(dense_to_system({{1, 0}, {0, 1}}, {4.0, 5.0}));
    EXPECT_EQ(id, (std::vector<double>{4.0, 5.0}));
    const auto x = solve_dense(dense_to_system({{2, 1}, {1, 2}}, {3.0, 3.0}));
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
    EXPECT_THROW(solve_dense(dense_to_system({{1, 1}, {1, 1}}, {1.0, 1.0})), SingularSystemError);
}

TEST(SolveDense, SizeLimit)
{
    const auto mesh = gen_square(30, 1.0);  // 961 nodes
    auto sys = assemble(mesh, iso(1.0, 1.0), Method::dec);
    sys.fixed = boundary_dirichlet(mesh, 0.0);
    EXPECT_THROW(solve_dense(apply_dirichlet(sys)), ValidationError);
}

TEST(Solve, ConstantBoundaryHarmonic)
{
    const auto mesh = gen_square(8, 1.0);
    for (auto method : {Method::dec, Method::feml}) {
        auto sys = assemble(mesh, iso(1.0, 0.0), method);
        sys.fixed = boundary_dirichlet(mesh, 10.0);
        const auto r = solve_cg(apply_dirichlet(sys));
        for (double v : r.solution) EXPECT_NEAR(v, 10.0, 1e-9);
    }
}

TEST(Solve, MaximumPrincipleOnWellCenteredDisk)
{
    const auto mesh = gen_disk(6, 1.0);
    auto sys = assemble(mesh, iso(2.0, 1.0), Method::dec);
    sys.fixed = boundary_dirichlet(mesh, 3.0);
    const auto r = solve_cg(apply_dirichlet(sys));
    for (double v : r.solution) EXPECT_GE(v, 3.0 - 1e-12);
}

} // namespace
