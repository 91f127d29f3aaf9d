#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "support.hpp"

using namespace dec2d;
using namespace dec2d::testing;

namespace {

const char* kOneTriangle = R"(# smallest valid mesh
nodes 3
0 0
1 0
0 1
elements 1
0 1 2 0
)";

std::set<std::pair<double, double>> coordinate_set(const TriMesh& m)
{
    std::set<std::pair<double, double>> s;
    // Rounded so that midpoint and grid arithmetic compare equal.
    for (const auto& p : m.points()) s.insert({std::round(p.x * 1e9) / 1e9, std::round(p.y * 1e9) / 1e9});
    return s;
}

void expect_boundary_matches_edge_incidence(const TriMesh& m)
{
    std::set<NodeIndex> expected;
    for (const auto& e : m.edges()) {
        if (e.incident == 1) expected.insert(e.nodes.begin(), e.nodes.end());
    }
    const std::set<NodeIndex> got(m.boundary_nodes().begin(), m.boundary_nodes().end());
    EXPECT_EQ(got, expected);
}

void expect_positive_orientation(const TriMesh& m)
{
    for (std::size_t t = 0; t < m.triangle_count(); ++t) EXPECT_GT(m.area(t), 0.0);
}

TEST(ParseMesh, SingleTriangle)
{
    const auto d = parse_mesh(kOneTriangle);
    EXPECT_EQ(d.mesh.node_count(), 3u);
    EXPECT_EQ(d.mesh.triangle_count(), 1u);
    EXPECT_EQ(d.mesh.boundary_nodes().size(), 3u);
    EXPECT_EQ(d.mesh.reoriented(), 0u);
    EXPECT_TRUE(d.materials.empty());
    EXPECT_TRUE(d.dirichlet.empty());
}

TEST(ParseMesh, ClockwiseElementIsFlipped)
{
    const auto d = parse_mesh("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 2 1 0\n");
    EXPECT_EQ(d.mesh.reoriented(), 1u);
    EXPECT_GT(d.mesh.area(0), 0.0);
    const auto a = d.mesh.triangles()[0].nodes;
    EXPECT_EQ(std::set<NodeIndex>(a.begin(), a.end()), (std::set<NodeIndex>{0, 1, 2}));
}

TEST(ParseMesh, OutOfRangeIndex)
{
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 7 0\n"), ValidationError);
}

TEST(ParseMesh, MaterialsAndDirichlet)
{
    const auto d = parse_mesh(std::string(kOneTriangle) + "materials 1\n0 1.5 1 30 2\ndirichlet 2\n0 10\n1 10.5\n");
    ASSERT_EQ(d.materials.size(), 1u);
    const auto& m = d.materials.at(0);
    EXPECT_EQ(m.kx, 1.5);
    EXPECT_EQ(m.ky, 1.0);
    EXPECT_EQ(m.angle_deg, 30.0);
    EXPECT_EQ(m.q, 2.0);
    EXPECT_EQ(d.dirichlet, (DirichletSet{{0, 10.0}, {1, 10.5}}));
}

TEST(ParseMesh, ErrorsCarryLineNumbers)
{
    try {
        parse_mesh("nodes 2\n0 0\n1 x\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        parse_mesh("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 2\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 6u);
    }
}

TEST(ParseMesh, MalformedInputs)
{
    EXPECT_THROW(parse_mesh(""), ParseError);
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n"), ParseError);
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n0 1\n"), ParseError);
    EXPECT_THROW(parse_mesh("vertices 3\n"), ParseError);
    EXPECT_THROW(parse_mesh("nodes -1\n"), ParseError);
    EXPECT_THROW(parse_mesh(std::string(kOneTriangle) + "nodes 1\n0 0\n"), ParseError);
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n0 nan\nelements 1\n0 1 2 0\n"), ValidationError);
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n2 0\nelements 1\n0 1 2 0\n"), ValidationError);
    EXPECT_THROW(parse_mesh("nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 1 0\n"), ValidationError);
    EXPECT_THROW(parse_mesh(std::string(kOneTriangle) + "materials 1\n0 0 1 0 0\n"), ValidationError);
    EXPECT_THROW(parse_mesh(std::string(kOneTriangle) + "dirichlet 2\n0 1\n0 2\n"), ValidationError);
}

TEST(ParseMesh, NonManifoldEdgeRejected)
{
    // Three triangles share edge (0, 1).
    EXPECT_THROW(parse_mesh("nodes 5\n0 0\n1 0\n0.5 1\n0.5 -1\n0.5 2\nelements 3\n0 1 2 0\n1 0 3 0\n0 1 4 0\n"),
                 ValidationError);
}

TEST(ParseMesh, DirichletMustBeOnBoundary)
{
    const auto text = write_mesh_string(gen_square(2, 1.0));
    EXPECT_THROW(parse_mesh(text + "dirichlet 1\n4 1\n"), ValidationError);
    EXPECT_NO_THROW(parse_mesh(text + "dirichlet 1\n0 1\n"));
}

TEST(WriteMesh, RoundTripIsExact)
{
    const auto mesh = gen_disk(3, 1.7);
    const MaterialTable mats{{0, Material{0, 1.5, 1.0, 30.0, 1.0 / 3.0}}};
    const auto dir = boundary_dirichlet(mesh, 0.1);
    const auto text = write_mesh_string(mesh, mats, dir);
    const auto back = parse_mesh(text);
    ASSERT_EQ(back.mesh.node_count(), mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) EXPECT_EQ(back.mesh.points()[i], mesh.points()[i]);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        EXPECT_EQ(back.mesh.triangles()[t].nodes, mesh.triangles()[t].nodes);
    }
    EXPECT_EQ(back.materials.at(0).q, 1.0 / 3.0);
    EXPECT_EQ(back.dirichlet, dir);
    EXPECT_EQ(write_mesh_string(back.mesh, back.materials, back.dirichlet), text);
}

TEST(GenSquare, Counts)
{
    const auto one = gen_square(1, 1.0);
    EXPECT_EQ(one.node_count(), 4u);
    EXPECT_EQ(one.triangle_count(), 2u);
    EXPECT_EQ(one.material_ids(), (std::vector<int>{0}));

    const auto two = gen_square(2, 1.0);
    EXPECT_EQ(two.node_count(), 9u);
    EXPECT_EQ(two.triangle_count(), 8u);
    for (int n : {1, 3, 7, 12}) {
        const auto m = gen_square(n, 2.0);
        EXPECT_EQ(m.node_count(), static_cast<std::size_t>((n + 1) * (n + 1)));
        EXPECT_EQ(m.triangle_count(), static_cast<std::size_t>(2 * n * n));
        EXPECT_EQ(m.boundary_nodes().size(), static_cast<std::size_t>(4 * n));
        EXPECT_NEAR(m.total_area(), 4.0, 1e-12);
        expect_positive_orientation(m);
        expect_boundary_matches_edge_incidence(m);
    }
}

TEST(GenSquare, InclusionByCentroid)
{
    const CircleInclusion inc{{1, 1}, 0.5, 7, 3};
    const auto m = gen_square(10, 2.0, inc);
    int inside = 0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto c = m.corners(t);
        const Point2 g = (c[0] + c[1] + c[2]) * (1.0 / 3);
        const bool in = std::hypot(g.x - 1, g.y - 1) < 0.5;
        inside += in;
        EXPECT_EQ(m.triangles()[t].material, in ? 7 : 3);
    }
    EXPECT_GT(inside, 0);
}

TEST(GenSquare, InvalidParameters)
{
    EXPECT_THROW(gen_square(0, 1.0), UsageError);
    EXPECT_THROW(gen_square(2, 0.0), UsageError);
    EXPECT_THROW(gen_square(2, 1.0, CircleInclusion{{0.5, 0.5}, -1.0}), UsageError);
}

TEST(GenDisk, Counts)
{
    const auto r1 = gen_disk(1, 1.0);
    EXPECT_EQ(r1.node_count(), 7u);
    EXPECT_EQ(r1.triangle_count(), 6u);
    const auto r2 = gen_disk(2, 1.0);
    EXPECT_EQ(r2.node_count(), 19u);
    EXPECT_EQ(r2.triangle_count(), 24u);
    for (int r = 1; r <= 12; ++r) {
        const auto m = gen_disk(r, 1.0);
        EXPECT_EQ(m.node_count(), static_cast<std::size_t>(1 + 3 * r * (r + 1)));
        EXPECT_EQ(m.triangle_count(), static_cast<std::size_t>(6 * r * r));
        EXPECT_EQ(m.boundary_nodes().size(), static_cast<std::size_t>(6 * r));
        expect_positive_orientation(m);
        expect_boundary_matches_edge_incidence(m);
        for (auto n : m.boundary_nodes()) EXPECT_NEAR(norm(m.points()[n]), 1.0, 1e-14);
    }
}

TEST(GenDisk, Scaling)
{
    const auto m = gen_disk(1, 2.0);
    for (auto n : m.boundary_nodes()) EXPECT_NEAR(norm(m.points()[n]), 2.0, 1e-14);
    EXPECT_THROW(gen_disk(0, 1.0), UsageError);
    EXPECT_THROW(gen_disk(2, -1.0), UsageError);
}

TEST(GenEgg, BandsAndBoundary)
{
    const auto m = gen_egg(2);
    EXPECT_EQ(m.node_count(), static_cast<std::size_t>(1 + 3 * 8 * 9));
    EXPECT_EQ(m.material_ids(), (std::vector<int>{1, 2, 3, 4}));
    expect_positive_orientation(m);
    expect_boundary_matches_edge_incidence(m);
    const auto outer = egg_curves().back();
    for (auto n : m.boundary_nodes()) {
        const auto p = m.points()[n];
        EXPECT_NEAR(norm(outer.project(p) - p), 0.0, 1e-12);
    }
    // Reference points on the outer curve.
    EXPECT_NEAR(outer.at(0).x, 8.0, 1e-14);
    EXPECT_NEAR(outer.at(std::numbers::pi).x, -5.0, 1e-14);
    EXPECT_NEAR(outer.at(std::numbers::pi / 2).y, 4.0, 1e-14);
    EXPECT_THROW(gen_egg(0), UsageError);
}

TEST(Refine, SingleTriangle)
{
    const auto m = refine(parse_mesh(kOneTriangle).mesh);
    EXPECT_EQ(m.node_count(), 6u);
    EXPECT_EQ(m.triangle_count(), 4u);
    EXPECT_NEAR(m.total_area(), 0.5, 1e-15);
    expect_positive_orientation(m);
}

TEST(Refine, SquareMatchesFinerGenerator)
{
    const auto m = refine(gen_square(1, 1.0));
    EXPECT_EQ(m.node_count(), 9u);
    EXPECT_EQ(m.triangle_count(), 8u);
    EXPECT_EQ(coordinate_set(m), coordinate_set(gen_square(2, 1.0)));
    const auto m3 = refine(refine(gen_square(3, 2.0)));
    EXPECT_EQ(coordinate_set(m3), coordinate_set(gen_square(12, 2.0)));
    EXPECT_NEAR(m3.total_area(), 4.0, 1e-12 * 4.0);
}

TEST(Refine, CountsAndMaterials)
{
    const auto base = gen_square(6, 1.0, CircleInclusion{{0.5, 0.5}, 0.3, 1, 2});
    const auto fine = refine(base);
    EXPECT_EQ(fine.node_count(), base.node_count() + base.edges().size());
    EXPECT_EQ(fine.triangle_count(), 4 * base.triangle_count());
    for (std::size_t t = 0; t < base.triangle_count(); ++t) {
        for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(fine.triangles()[4 * t + c].material, base.triangles()[t].material);
    }
    expect_boundary_matches_edge_incidence(fine);
}

TEST(Refine, DiskProjectionGrowsAreaTowardCircle)
{
    auto m = gen_disk(2, 1.0);
    const auto project = circle_projector({0, 0}, 1.0);
    double area = m.total_area();
    for (int level = 0; level < 4; ++level) {
        m = refine(m, project);
        EXPECT_GT(m.total_area(), area);
        EXPECT_LT(m.total_area(), std::numbers::pi);
        area = m.total_area();
        for (auto n : m.boundary_nodes()) EXPECT_NEAR(norm(m.points()[n]), 1.0, 1e-14);
        expect_positive_orientation(m);
    }
    // Same node count as the directly generated finer disk.
    EXPECT_EQ(m.node_count(), gen_disk(32, 1.0).node_count());
}

TEST(TriMesh, UnusedNodeRejected)
{
    EXPECT_THROW(TriMesh({{0, 0}, {1, 0}, {0, 1}, {5, 5}}, {Triangle{{0, 1, 2}, 0}}), ValidationError);
    EXPECT_THROW(TriMesh({}, {}), ValidationError);
}

TEST(TriMesh, FindEdge)
{
    const auto m = gen_square(1, 1.0);
    EXPECT_TRUE(m.find_edge(0, 1).has_value());
    EXPECT_TRUE(m.find_edge(3, 0).has_value());
    EXPECT_TRUE(m.find_edge(0, 3).has_value());
    EXPECT_FALSE(m.find_edge(1, 2).has_value());
    EXPECT_EQ(m.edges()[*m.find_edge(0, 3)].incident, 2);
}

TEST(Validation, MaterialsAndDirichlet)
{
    const auto m = gen_square(2, 1.0, CircleInclusion{{0.5, 0.5}, 0.3, 1, 2});
    EXPECT_THROW(validate_materials(m, {{1, Material{1}}}), ValidationError);
    EXPECT_NO_THROW(validate_materials(m, {{1, Material{1}}, {2, Material{2}}}));
    EXPECT_THROW(validate_materials(m, {{1, Material{1}}, {2, Material{2, -1.0}}}), ValidationError);
    EXPECT_THROW(validate_dirichlet(m, {{4, 0.0}}), ValidationError);
    EXPECT_THROW(validate_dirichlet(m, {{99, 0.0}}), ValidationError);
    EXPECT_THROW(validate_dirichlet(m, {{0, std::nan("")}}), ValidationError);
}

} // namespace
