/**
 * @file postprocess.hpp
 * @brief Flux recovery, line sampling, error norms and VTK/CSV export.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dec2d/error.hpp"
#include "dec2d/local_ops.hpp"
#include "dec2d/mesh.hpp"
#include "dec2d/text.hpp"

namespace dec2d {

/// Nodal values on a mesh.
struct ScalarField {
    const TriMesh* mesh{nullptr};
    std::vector<double> values;

    ScalarField(const TriMesh& m, std::vector<double> v) : mesh(&m), values(std::move(v))
    {
        if (values.size() != m.node_count()) throw ValidationError("scalar field size differs from node count");
    }
};

/// One constant vector per element.
struct FluxField {
    const TriMesh* mesh{nullptr};
    std::vector<Point2> vectors;

    FluxField(const TriMesh& m, std::vector<Point2> v) : mesh(&m), vectors(std::move(v))
    {
        if (vectors.size() != m.triangle_count()) throw ValidationError("flux field size differs from element count");
    }
};

/// Per-element anisotropic flux K_e * grad(u_h).
inline FluxField element_fluxes(const TriMesh& mesh, const MaterialTable& materials, const ScalarField& u)
{
    std::vector<Point2> out;
    out.reserve(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto v = mesh.corners(t);
        const std::array<double, 3> f{u.values[tri.nodes[0]], u.values[tri.nodes[1]], u.values[tri.nodes[2]]};
        out.push_back(anisotropic_flux(v[0], v[1], v[2], materials.at(tri.material).tensor(), f));
    }
    return {mesh, std::move(out)};
}

/// Area-weighted average of incident element vectors, then magnitude.
inline ScalarField nodal_flux_magnitude(const FluxField& flux)
{
    const auto& mesh = *flux.mesh;
    std::vector<Point2> sum(mesh.node_count());
    std::vector<double> weight(mesh.node_count(), 0.0);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const double a = mesh.area(t);
        for (auto n : mesh.triangles()[t].nodes) {
            sum[n] += flux.vectors[t] * a;
            weight[n] += a;
        }
    }
    std::vector<double> mag(mesh.node_count());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = norm(sum[i] * (1.0 / weight[i]));
    return {mesh, std::move(mag)};
}

/// Magnitudes of element vectors.
inline std::vector<double> element_magnitudes(const FluxField& flux)
{
    std::vector<double> out;
    out.reserve(flux.vectors.size());
    for (const auto& v : flux.vectors) out.push_back(norm(v));
    return out;
}

inline constexpr double kBarycentricTolerance = 1e-12;

/// First element containing p, with its barycentric coordinates.
inline std::optional<std::pair<std::size_t, std::array<double, 3>>> locate(const TriMesh& mesh, const Point2& p)
{
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto v = mesh.corners(t);
        const double twice = orient(v[0], v[1], v[2]);
        const std::array<double, 3> b{orient(p, v[1], v[2]) / twice, orient(v[0], p, v[2]) / twice,
                                      orient(v[0], v[1], p) / twice};
        if (b[0] >= -kBarycentricTolerance && b[1] >= -kBarycentricTolerance && b[2] >= -kBarycentricTolerance) {
            return std::pair{t, b};
        }
    }
    return std::nullopt;
}

/// One sample along a segment; value is NaN where the point is outside the mesh.
struct LineSample {
    double t{};
    double x{};
    double y{};
    double value{};
};

namespace detail {

template <class Eval>
std::vector<LineSample> sample_segment(const TriMesh& mesh, const Point2& p0, const Point2& p1, int samples, Eval eval)
{
    if (samples < 1) throw ValidationError("sample count must be >= 1");
    std::vector<LineSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        const double t = samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1);
        const Point2 p = p0 + (p1 - p0) * t;
        const auto hit = locate(mesh, p);
        const double value = hit ? eval(hit->first, hit->second) : std::numeric_limits<double>::quiet_NaN();
        out.push_back({t, p.x, p.y, value});
    }
    return out;
}

} // namespace detail

/// Linear interpolation of nodal values along [p0, p1].
inline std::vector<LineSample> sample_line(const ScalarField& field, const Point2& p0, const Point2& p1, int samples)
{
    const auto& mesh = *field.mesh;
    return detail::sample_segment(mesh, p0, p1, samples, [&](std::size_t t, const std::array<double, 3>& b) {
        const auto& n = mesh.triangles()[t].nodes;
        return b[0] * field.values[n[0]] + b[1] * field.values[n[1]] + b[2] * field.values[n[2]];
    });
}

/// Piecewise-constant flux magnitude along [p0, p1].
inline std::vector<LineSample> sample_line(const FluxField& field, const Point2& p0, const Point2& p1, int samples)
{
    return detail::sample_segment(*field.mesh, p0, p1, samples,
                                  [&](std::size_t t, const std::array<double, 3>&) { return norm(field.vectors[t]); });
}

/// Interpolated value at a point, if inside the mesh.
inline std::optional<double> probe(const ScalarField& field, const Point2& p)
{
    const auto hit = locate(*field.mesh, p);
    if (!hit) return std::nullopt;
    const auto& n = field.mesh->triangles()[hit->first].nodes;
    const auto& b = hit->second;
    return b[0] * field.values[n[0]] + b[1] * field.values[n[1]] + b[2] * field.values[n[2]];
}

/// Node closest to p (lowest index on ties), optionally restricted to the boundary.
inline NodeIndex nearest_node(const TriMesh& mesh, const Point2& p, bool boundary_only = false)
{
    NodeIndex best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeIndex i = 0; i < mesh.node_count(); ++i) {
        if (boundary_only && !mesh.is_boundary(i)) continue;
        const double d = norm(mesh.points()[i] - p);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

struct ErrorNorms {
    double linf{0.0};
    double l2{0.0};
};

/// Max nodal error and L2 error with the 3-point vertex rule per element.
inline ErrorNorms error_norms(const ScalarField& u, const std::function<double(const Point2&)>& exact)
{
    const auto& mesh = *u.mesh;
    std::vector<double> err(mesh.node_count());
    ErrorNorms out;
    for (NodeIndex i = 0; i < mesh.node_count(); ++i) {
        err[i] = u.values[i] - exact(mesh.points()[i]);
        out.linf = std::max(out.linf, std::abs(err[i]));
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& n = mesh.triangles()[t].nodes;
        const double m = (err[n[0]] * err[n[0]] + err[n[1]] * err[n[1]] + err[n[2]] * err[n[2]]) / 3.0;
        sum += mesh.area(t) * m;
    }
    out.l2 = std::sqrt(sum);
    return out;
}

// ---------------------------------------------------------------------------
// Export

struct NamedScalars {
    std::string name;
    std::vector<double> values;
};

struct NamedVectors {
    std::string name;
    std::vector<Point2> values;
};

/// Legacy ASCII VTK unstructured grid (z = 0), point scalars and cell vectors.
inline void write_vtk(std::ostream& os, const TriMesh& mesh, const std::vector<NamedScalars>& point_data = {},
                      const std::vector<NamedVectors>& cell_data = {})
{
    using text::format_real;
    for (const auto& f : point_data)
        if (f.values.size() != mesh.node_count()) throw ValidationError("point field '" + f.name + "' has wrong size");
    for (const auto& f : cell_data)
        if (f.values.size() != mesh.triangle_count()) throw ValidationError("cell field '" + f.name + "' has wrong size");

    os << "# vtk DataFile Version 3.0\n";
    os << "dec2d output\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.points()) os << format_real(p.x) << ' ' << format_real(p.y) << " 0\n";
    os << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
    for (const auto& t : mesh.triangles()) os << "3 " << t.nodes[0] << ' ' << t.nodes[1] << ' ' << t.nodes[2] << '\n';
    os << "CELL_TYPES " << mesh.triangle_count() << '\n';
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) os << "5\n";  // VTK_TRIANGLE
    if (!point_data.empty()) {
        os << "POINT_DATA " << mesh.node_count() << '\n';
        for (const auto& f : point_data) {
            os << "SCALARS " << f.name << " double 1\n";
            os << "LOOKUP_TABLE default\n";
            for (double v : f.values) os << format_real(v) << '\n';
        }
    }
    if (!cell_data.empty()) {
        os << "CELL_DATA " << mesh.triangle_count() << '\n';
        for (const auto& f : cell_data) {
            os << "VECTORS " << f.name << " double\n";
            for (const auto& v : f.values) os << format_real(v.x) << ' ' << format_real(v.y) << " 0\n";
        }
    }
}

inline void write_csv(std::ostream& os, const std::vector<LineSample>& samples)
{
    using text::format_real;
    os << "t,x,y,value\n";
    for (const auto& s : samples) {
        os << format_real(s.t) << ',' << format_real(s.x) << ',' << format_real(s.y) << ',' << format_real(s.value)
           << '\n';
    }
}

/// Reads the CSV written by write_csv.
inline std::vector<LineSample> read_csv(std::string_view content)
{
    std::vector<LineSample> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const auto line = text::trim(content.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != "t,x,y,value") throw ParseError(line_no, "expected header 't,x,y,value'");
            continue;
        }
        if (line.empty()) continue;
        const auto fields = text::split(line, ',');
        if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields");
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto r = text::parse_real(fields[i]);
            if (!r) throw ParseError(line_no, "expected a number, got '" + std::string(fields[i]) + "'");
            v[i] = *r;
        }
        out.push_back({v[0], v[1], v[2], v[3]});
    }
    return out;
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    writer(os);
    os.flush();
    if (!os) throw Error("write to '" + path + "' failed");
}

} // namespace dec2d
