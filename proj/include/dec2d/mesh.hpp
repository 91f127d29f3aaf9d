/**
 * @file mesh.hpp
 * @brief Triangle mesh container, plain-text mesh format, structured
 *        generators and uniform refinement.
 *
 * Mesh file format (line oriented, '#' starts a comment, 0-based indices):
 *
 *     nodes N       followed by N lines  "x y"
 *     elements M    followed by M lines  "i j k mat_id"
 *     materials P   followed by P lines  "mat_id kx ky angle_deg q"
 *     dirichlet D   followed by D lines  "node_id value"
 *
 * `nodes` and `elements` are required; the other two sections are optional.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dec2d/error.hpp"
#include "dec2d/geometry.hpp"
#include "dec2d/text.hpp"

namespace dec2d {

using NodeIndex = std::size_t;

struct Triangle {
    std::array<NodeIndex, 3> nodes{};
    int material{0};

    friend bool operator==(const Triangle&, const Triangle&) = default;
};

/// Region material: principal diffusivities, principal angle and source density.
struct Material {
    int id{0};
    double kx{1.0};
    double ky{1.0};
    double angle_deg{0.0};
    double q{0.0};

    [[nodiscard]] AnisotropyTensor<double> tensor() const { return material_tensor(kx, ky, angle_deg); }
};

using MaterialTable = std::map<int, Material>;

/// Prescribed nodal values, ordered by node index.
using DirichletSet = std::map<NodeIndex, double>;

/// Undirected edge with its number of incident triangles.
struct Edge {
    std::array<NodeIndex, 2> nodes{};  ///< nodes[0] < nodes[1]
    int incident{0};
};

/**
 * Validated, counter-clockwise triangle mesh. Immutable after construction.
 *
 * Construction checks index bounds, distinct corners, non-degeneracy,
 * manifold edges and that every node is referenced, and flips clockwise
 * triangles (the number flipped is available from reoriented()).
 */
class TriMesh {
public:
    TriMesh(std::vector<Point2> points, std::vector<Triangle> triangles)
        : points_(std::move(points)), triangles_(std::move(triangles))
    {
        validate_and_orient();
        build_edges();
    }

    [[nodiscard]] const std::vector<Point2>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<NodeIndex>& boundary_nodes() const noexcept { return boundary_; }
    [[nodiscard]] bool is_boundary(NodeIndex n) const { return on_boundary_.at(n) != 0; }
    [[nodiscard]] std::size_t node_count() const noexcept { return points_.size(); }
    [[nodiscard]] std::size_t triangle_count() const noexcept { return triangles_.size(); }
    [[nodiscard]] std::size_t reoriented() const noexcept { return reoriented_; }

    [[nodiscard]] std::array<Point2, 3> corners(std::size_t t) const
    {
        const auto& n = triangles_[t].nodes;
        return {points_[n[0]], points_[n[1]], points_[n[2]]};
    }

    [[nodiscard]] double area(std::size_t t) const
    {
        const auto c = corners(t);
        return orient(c[0], c[1], c[2]) / 2.0;
    }

    [[nodiscard]] double total_area() const
    {
        double a = 0.0;
        for (std::size_t t = 0; t < triangles_.size(); ++t) a += area(t);
        return a;
    }

    /// Index of edge {a, b} in edges(), if present.
    [[nodiscard]] std::optional<std::size_t> find_edge(NodeIndex a, NodeIndex b) const
    {
        if (a > b) std::swap(a, b);
        const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::array<NodeIndex, 2>{a, b},
                                         [](const Edge& e, const std::array<NodeIndex, 2>& key) { return e.nodes < key; });
        if (it == edges_.end() || it->nodes != std::array<NodeIndex, 2>{a, b}) return std::nullopt;
        return static_cast<std::size_t>(it - edges_.begin());
    }

    /// Distinct material ids in ascending order.
    [[nodiscard]] std::vector<int> material_ids() const
    {
        std::vector<int> ids;
        for (const auto& t : triangles_) ids.push_back(t.material);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }

private:
    void validate_and_orient()
    {
        if (triangles_.empty()) throw ValidationError("mesh has no elements");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
                throw ValidationError("node " + std::to_string(i) + " has non-finite coordinates");
            }
        }
        std::vector<char> used(points_.size(), 0);
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            auto& n = triangles_[t].nodes;
            for (auto idx : n) {
                if (idx >= points_.size()) {
                    throw ValidationError("element " + std::to_string(t) + " references node " + std::to_string(idx) +
                                          " but the mesh has " + std::to_string(points_.size()) + " nodes");
                }
                used[idx] = 1;
            }
            if (n[0] == n[1] || n[1] == n[2] || n[0] == n[2]) {
                throw ValidationError("element " + std::to_string(t) + " repeats a node");
            }
            const double twice = orient(points_[n[0]], points_[n[1]], points_[n[2]]);
            const double h2 = detail::max_edge_sq(points_[n[0]], points_[n[1]], points_[n[2]]);
            if (!(std::abs(twice) * 0.5 > kDegeneracyRatio<double> * h2)) {
                throw ValidationError("element " + std::to_string(t) + " is degenerate");
            }
            if (twice < 0) {
                std::swap(n[1], n[2]);
                ++reoriented_;
            }
        }
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (!used[i]) throw ValidationError("node " + std::to_string(i) + " is not used by any element");
        }
    }

    void build_edges()
    {
        std::vector<std::array<NodeIndex, 2>> all;
        all.reserve(3 * triangles_.size());
        for (const auto& t : triangles_) {
            for (int i = 0; i < 3; ++i) {
                auto a = t.nodes[i];
                auto b = t.nodes[(i + 1) % 3];
                if (a > b) std::swap(a, b);
                all.push_back({a, b});
            }
        }
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size();) {
            std::size_t j = i;
            while (j < all.size() && all[j] == all[i]) ++j;
            const int count = static_cast<int>(j - i);
            if (count > 2) {
                throw ValidationError("non-manifold edge (" + std::to_string(all[i][0]) + ", " +
                                      std::to_string(all[i][1]) + ") shared by " + std::to_string(count) + " elements");
            }
            edges_.push_back({all[i], count});
            i = j;
        }
        on_boundary_.assign(points_.size(), 0);
        for (const auto& e : edges_) {
            if (e.incident == 1) {
                on_boundary_[e.nodes[0]] = 1;
                on_boundary_[e.nodes[1]] = 1;
            }
        }
        for (NodeIndex i = 0; i < points_.size(); ++i) {
            if (on_boundary_[i]) boundary_.push_back(i);
        }
    }

    std::vector<Point2> points_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<NodeIndex> boundary_;
    std::vector<char> on_boundary_;
    std::size_t reoriented_{0};
};

/// Every boundary node fixed to `value`.
inline DirichletSet boundary_dirichlet(const TriMesh& mesh, double value)
{
    DirichletSet d;
    for (auto n : mesh.boundary_nodes()) d.emplace(n, value);
    return d;
}

inline void validate_dirichlet(const TriMesh& mesh, const DirichletSet& d)
{
    for (const auto& [node, value] : d) {
        if (node >= mesh.node_count()) {
            throw ValidationError("dirichlet node " + std::to_string(node) + " out of range");
        }
        if (!mesh.is_boundary(node)) {
            throw ValidationError("dirichlet node " + std::to_string(node) + " is not a boundary node");
        }
        if (!std::isfinite(value)) {
            throw ValidationError("dirichlet value for node " + std::to_string(node) + " is not finite");
        }
    }
}

inline void validate_materials(const TriMesh& mesh, const MaterialTable& materials)
{
    for (int id : mesh.material_ids()) {
        if (!materials.contains(id)) throw ValidationError("material " + std::to_string(id) + " is not defined");
    }
    for (const auto& [id, m] : materials) {
        if (!(m.kx > 0) || !(m.ky > 0)) {
            throw ValidationError("material " + std::to_string(id) + " must have kx > 0 and ky > 0");
        }
        if (!std::isfinite(m.kx) || !std::isfinite(m.ky) || !std::isfinite(m.angle_deg) || !std::isfinite(m.q)) {
            throw ValidationError("material " + std::to_string(id) + " has non-finite parameters");
        }
    }
}

/// Mesh file contents.
struct MeshData {
    TriMesh mesh;
    MaterialTable materials;
    DirichletSet dirichlet;
};

/// Parses the mesh file format. See the file comment for the layout.
inline MeshData parse_mesh(std::string_view content)
{
    struct Line {
        std::size_t number;
        std::vector<std::string_view> tokens;
    };
    std::vector<Line> lines;
    {
        std::size_t number = 0;
        std::size_t start = 0;
        while (start <= content.size()) {
            const auto end = content.find('\n', start);
            const auto raw = content.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
            ++number;
            auto tokens = text::split_ws(text::strip_comment(raw));
            if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
    }

    auto real_at = [](const Line& l, std::size_t i) {
        const auto v = text::parse_real(l.tokens[i]);
        if (!v) throw ParseError(l.number, "expected a number, got '" + std::string(l.tokens[i]) + "'");
        return *v;
    };
    auto index_at = [](const Line& l, std::size_t i) {
        const auto v = text::parse_int(l.tokens[i]);
        if (!v) throw ParseError(l.number, "expected an integer, got '" + std::string(l.tokens[i]) + "'");
        return *v;
    };
    auto node_at = [&](const Line& l, std::size_t i) {
        const auto v = index_at(l, i);
        if (v < 0) throw ValidationError("line " + std::to_string(l.number) + ": negative node index");
        return static_cast<NodeIndex>(v);
    };

    std::optional<std::vector<Point2>> points;
    std::optional<std::vector<Triangle>> triangles;
    MaterialTable materials;
    DirichletSet dirichlet;
    bool have_materials = false;
    bool have_dirichlet = false;

    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& head = lines[i];
        if (head.tokens.size() != 2) throw ParseError(head.number, "expected '<section> <count>'");
        const auto section = head.tokens[0];
        const auto count_v = text::parse_int(head.tokens[1]);
        if (!count_v || *count_v < 0) throw ParseError(head.number, "invalid section count");
        const auto count = static_cast<std::size_t>(*count_v);
        if (i + count >= lines.size()) {
            throw ParseError(head.number, "section '" + std::string(section) + "' is truncated");
        }
        auto expect = [&](const Line& l, std::size_t n) {
            if (l.tokens.size() != n) {
                throw ParseError(l.number, "expected " + std::to_string(n) + " fields in '" + std::string(section) +
                                               "' entry, got " + std::to_string(l.tokens.size()));
            }
        };
        if (section == "nodes") {
            if (points) throw ParseError(head.number, "duplicate 'nodes' section");
            points.emplace();
            points->reserve(count);
            for (std::size_t k = 1; k <= count; ++k) {
                const auto& l = lines[i + k];
                expect(l, 2);
                points->push_back({real_at(l, 0), real_at(l, 1)});
            }
        } else if (section == "elements") {
            if (triangles) throw ParseError(head.number, "duplicate 'elements' section");
            triangles.emplace();
            triangles->reserve(count);
            for (std::size_t k = 1; k <= count; ++k) {
                const auto& l = lines[i + k];
                expect(l, 4);
                triangles->push_back({{node_at(l, 0), node_at(l, 1), node_at(l, 2)}, static_cast<int>(index_at(l, 3))});
            }
        } else if (section == "materials") {
            if (have_materials) throw ParseError(head.number, "duplicate 'materials' section");
            have_materials = true;
            for (std::size_t k = 1; k <= count; ++k) {
                const auto& l = lines[i + k];
                expect(l, 5);
                Material m{static_cast<int>(index_at(l, 0)), real_at(l, 1), real_at(l, 2), real_at(l, 3), real_at(l, 4)};
                if (!materials.emplace(m.id, m).second) {
                    throw ValidationError("line " + std::to_string(l.number) + ": duplicate material id " +
                                          std::to_string(m.id));
                }
            }
        } else if (section == "dirichlet") {
            if (have_dirichlet) throw ParseError(head.number, "duplicate 'dirichlet' section");
            have_dirichlet = true;
            for (std::size_t k = 1; k <= count; ++k) {
                const auto& l = lines[i + k];
                expect(l, 2);
                const auto node = node_at(l, 0);
                if (!dirichlet.emplace(node, real_at(l, 1)).second) {
                    throw ValidationError("line " + std::to_string(l.number) + ": node " + std::to_string(node) +
                                          " fixed twice");
                }
            }
        } else {
            throw ParseError(head.number, "unknown section '" + std::string(section) + "'");
        }
        i += count + 1;
    }
    const std::size_t last_line = lines.empty() ? 0 : lines.back().number;
    if (!points) throw ParseError(last_line, "missing 'nodes' section");
    if (!triangles) throw ParseError(last_line, "missing 'elements' section");

    TriMesh mesh(std::move(*points), std::move(*triangles));
    for (const auto& [id, m] : materials) {
        if (!(m.kx > 0) || !(m.ky > 0)) {
            throw ValidationError("material " + std::to_string(id) + " must have kx > 0 and ky > 0");
        }
    }
    validate_dirichlet(mesh, dirichlet);
    return {std::move(mesh), std::move(materials), std::move(dirichlet)};
}

/// Writes the mesh file format with round-trip exact reals.
inline void write_mesh(std::ostream& os, const TriMesh& mesh, const MaterialTable& materials = {},
                       const DirichletSet& dirichlet = {})
{
    using text::format_real;
    os << "nodes " << mesh.node_count() << '\n';
    for (const auto& p : mesh.points()) os << format_real(p.x) << ' ' << format_real(p.y) << '\n';
    os << "elements " << mesh.triangle_count() << '\n';
    for (const auto& t : mesh.triangles()) {
        os << t.nodes[0] << ' ' << t.nodes[1] << ' ' << t.nodes[2] << ' ' << t.material << '\n';
    }
    if (!materials.empty()) {
        os << "materials " << materials.size() << '\n';
        for (const auto& [id, m] : materials) {
            os << id << ' ' << format_real(m.kx) << ' ' << format_real(m.ky) << ' ' << format_real(m.angle_deg) << ' '
               << format_real(m.q) << '\n';
        }
    }
    if (!dirichlet.empty()) {
        os << "dirichlet " << dirichlet.size() << '\n';
        for (const auto& [node, value] : dirichlet) os << node << ' ' << format_real(value) << '\n';
    }
}

inline std::string write_mesh_string(const TriMesh& mesh, const MaterialTable& materials = {},
                                     const DirichletSet& dirichlet = {})
{
    std::ostringstream os;
    write_mesh(os, mesh, materials, dirichlet);
    return os.str();
}

// ---------------------------------------------------------------------------
// Generators

/// Circular inclusion for gen_square: material by centroid membership.
struct CircleInclusion {
    Point2 center{};
    double radius{0.0};
    int inside_material{1};
    int outside_material{2};
};

/**
 * Structured square [0, side]^2 with n cells per side, each cell split along
 * its (i, j)-(i+1, j+1) diagonal.
 */
inline TriMesh gen_square(int n, double side, std::optional<CircleInclusion> inclusion = std::nullopt,
                          int material = 0)
{
    if (n < 1) throw UsageError("square: n must be >= 1");
    if (!(side > 0)) throw UsageError("square: side must be > 0");
    if (inclusion && !(inclusion->radius > 0)) throw UsageError("square: inclusion radius must be > 0");
    const auto m = static_cast<NodeIndex>(n);
    std::vector<Point2> pts;
    pts.reserve((m + 1) * (m + 1));
    for (NodeIndex j = 0; j <= m; ++j)
        for (NodeIndex i = 0; i <= m; ++i)
            pts.push_back({side * static_cast<double>(i) / n, side * static_cast<double>(j) / n});

    auto id = [m](NodeIndex i, NodeIndex j) { return j * (m + 1) + i; };
    auto mat_of = [&](NodeIndex a, NodeIndex b, NodeIndex c) {
        if (!inclusion) return material;
        const Point2 g = (pts[a] + pts[b] + pts[c]) * (1.0 / 3.0);
        return norm(g - inclusion->center) < inclusion->radius ? inclusion->inside_material
                                                               : inclusion->outside_material;
    };
    std::vector<Triangle> tris;
    tris.reserve(2 * m * m);
    for (NodeIndex j = 0; j < m; ++j) {
        for (NodeIndex i = 0; i < m; ++i) {
            const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            tris.push_back({{a, b, c}, mat_of(a, b, c)});
            tris.push_back({{a, c, d}, mat_of(a, c, d)});
        }
    }
    return {std::move(pts), std::move(tris)};
}

namespace detail {

/// Ring-disk connectivity: center node, ring k holds 6k nodes.
struct RingLayout {
    std::vector<std::pair<int, double>> ring_angle;  ///< (ring, angle) per node
    std::vector<std::pair<std::array<NodeIndex, 3>, int>> tris;  ///< corners + outer ring index
};

inline RingLayout ring_layout(int rings)
{
    RingLayout out;
    out.ring_angle.push_back({0, 0.0});
    for (int k = 1; k <= rings; ++k) {
        for (int j = 0; j < 6 * k; ++j) {
            out.ring_angle.push_back({k, 2.0 * std::numbers::pi * j / (6.0 * k)});
        }
    }
    auto start = [](int k) -> NodeIndex { return k == 0 ? 0 : static_cast<NodeIndex>(1 + 3 * k * (k - 1)); };
    for (int k = 1; k <= rings; ++k) {
        const int no = 6 * k;
        const int ni = k == 1 ? 1 : 6 * (k - 1);
        auto out_node = [&](int j) { return start(k) + static_cast<NodeIndex>(j % no); };
        auto in_node = [&](int i) { return start(k - 1) + static_cast<NodeIndex>(i % ni); };
        if (k == 1) {
            for (int j = 0; j < no; ++j) out.tris.push_back({{in_node(0), out_node(j), out_node(j + 1)}, k});
            continue;
        }
        int i = 0, j = 0;
        while (i < ni || j < no) {
            // Compare the angles of the next outer and next inner nodes.
            const bool advance_outer = i == ni || (j < no && (j + 1) * (k - 1) <= (i + 1) * k);
            if (advance_outer) {
                out.tris.push_back({{in_node(i), out_node(j), out_node(j + 1)}, k});
                ++j;
            } else {
                out.tris.push_back({{in_node(i), out_node(j), in_node(i + 1)}, k});
                ++i;
            }
        }
    }
    return out;
}

} // namespace detail

/**
 * Fan-and-ring disk centered at the origin: ring k of `rings` holds 6k nodes
 * at radius k * radius / rings.
 */
inline TriMesh gen_disk(int rings, double radius, int material = 0)
{
    if (rings < 1) throw UsageError("disk: rings must be >= 1");
    if (!(radius > 0)) throw UsageError("disk: radius must be > 0");
    const auto layout = detail::ring_layout(rings);
    std::vector<Point2> pts;
    pts.reserve(layout.ring_angle.size());
    for (const auto& [k, theta] : layout.ring_angle) {
        const double r = radius * k / rings;
        pts.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    std::vector<Triangle> tris;
    tris.reserve(layout.tris.size());
    for (const auto& [nodes, k] : layout.tris) tris.push_back({nodes, material});
    return {std::move(pts), std::move(tris)};
}

/**
 * Closed curve made of four quarter ellipses centered at the origin, one per
 * quadrant. Semi-axes are given as positive extents along -x, +x, -y, +y.
 */
struct QuarterEllipseCurve {
    double x_neg{1.0};
    double x_pos{1.0};
    double y_neg{1.0};
    double y_pos{1.0};

    /// Point at parameter angle theta.
    [[nodiscard]] Point2 at(double theta) const
    {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return {(c >= 0 ? x_pos : x_neg) * c, (s >= 0 ? y_pos : y_neg) * s};
    }

    /// Radial projection of p onto the curve (p != origin).
    [[nodiscard]] Point2 project(const Point2& p) const
    {
        const double ax = p.x >= 0 ? x_pos : x_neg;
        const double ay = p.y >= 0 ? y_pos : y_neg;
        const double s = std::hypot(p.x / ax, p.y / ay);
        return s > 0 ? p * (1.0 / s) : p;
    }
};

/// Nested egg-shaped boundary curves through the reference points of the
/// layered-domain example, innermost first.
inline std::array<QuarterEllipseCurve, 4> egg_curves()
{
    return {{{1, 1, 1, 1}, {3, 6, 2, 2}, {4, 7, 3, 3}, {5, 8, 4, 4}}};
}

/// Materials of the four egg bands (ids 1..4, innermost first).
inline MaterialTable egg_materials()
{
    return {{1, {1, 5, 25, 30, 15}}, {2, {2, 25, 5, 0, 5}}, {3, {3, 50, 12, 45, 5}}, {4, {4, 10, 35, 0, 5}}};
}

/**
 * Layered egg domain: the ring-disk topology with `rings_per_band` rings in
 * each of the four bands between successive egg_curves(), mapped by linear
 * blending between curves. Band b (1-based, innermost first) gets material b.
 */
inline TriMesh gen_egg(int rings_per_band)
{
    if (rings_per_band < 1) throw UsageError("egg: rings_per_band must be >= 1");
    const int bands = 4;
    const int rings = bands * rings_per_band;
    const auto curves = egg_curves();
    const auto layout = detail::ring_layout(rings);
    std::vector<Point2> pts;
    pts.reserve(layout.ring_angle.size());
    for (const auto& [k, theta] : layout.ring_angle) {
        if (k == 0) {
            pts.push_back({0.0, 0.0});
            continue;
        }
        const int band = (k + rings_per_band - 1) / rings_per_band;
        const double s = static_cast<double>(k - (band - 1) * rings_per_band) / rings_per_band;
        const Point2 outer = curves[band - 1].at(theta);
        const Point2 inner = band == 1 ? Point2{0.0, 0.0} : curves[band - 2].at(theta);
        pts.push_back(inner * (1.0 - s) + outer * s);
    }
    std::vector<Triangle> tris;
    tris.reserve(layout.tris.size());
    for (const auto& [nodes, k] : layout.tris) {
        tris.push_back({nodes, (k + rings_per_band - 1) / rings_per_band});
    }
    return {std::move(pts), std::move(tris)};
}

/// Maps a new boundary midpoint onto the true domain boundary.
using BoundaryProjector = std::function<Point2(const Point2&)>;

inline BoundaryProjector circle_projector(Point2 center, double radius)
{
    return [center, radius](const Point2& p) {
        const auto d = p - center;
        const double r = norm(d);
        return r > 0 ? center + d * (radius / r) : p;
    };
}

inline BoundaryProjector egg_projector()
{
    return [curve = egg_curves().back()](const Point2& p) { return curve.project(p); };
}

/**
 * Uniform 4-to-1 refinement at edge midpoints. Children inherit the parent
 * material. Midpoints of boundary edges are passed through `project` when
 * given. New nodes are appended in edge order.
 */
inline TriMesh refine(const TriMesh& mesh, const BoundaryProjector& project = {})
{
    std::vector<Point2> pts = mesh.points();
    const auto base = pts.size();
    pts.reserve(base + mesh.edges().size());
    for (const auto& e : mesh.edges()) {
        Point2 mid = (pts[e.nodes[0]] + pts[e.nodes[1]]) * 0.5;
        if (e.incident == 1 && project) mid = project(mid);
        pts.push_back(mid);
    }
    auto mid_of = [&](NodeIndex a, NodeIndex b) { return base + *mesh.find_edge(a, b); };
    std::vector<Triangle> tris;
    tris.reserve(4 * mesh.triangle_count());
    for (const auto& t : mesh.triangles()) {
        const auto [a, b, c] = t.nodes;
        const auto ab = mid_of(a, b), bc = mid_of(b, c), ca = mid_of(c, a);
        tris.push_back({{a, ab, ca}, t.material});
        tris.push_back({{ab, b, bc}, t.material});
        tris.push_back({{ca, bc, c}, t.material});
        tris.push_back({{ab, bc, ca}, t.material});
    }
    return {std::move(pts), std::move(tris)};
}

} // namespace dec2d
