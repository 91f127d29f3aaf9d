/**
 * @file scenario.hpp
 * @brief Scenario files and the solve / convergence / meshgen drivers behind
 *        the command-line tool.
 *
 * A scenario is an INI-style document:
 *
 *     [mesh]                 # exactly one of `file` or `generator`
 *     generator = disk       # square | disk | egg, other keys are parameters
 *     rings = 8
 *
 *     [material 0]           # one section per material id
 *     kx = 1.5
 *     ky = 1.0
 *     angle = 30
 *     q = 1
 *
 *     [dirichlet]
 *     value = 10             # every boundary node, or `file = nodes.txt`
 *
 *     [solver]
 *     method = both          # dec | feml | both
 *     tol = 1e-10
 *     max_iter = 0           # 0 selects 10 n
 *
 *     [output]
 *     vtk = true
 *     line = -1,0,1,0,101    # repeatable
 *     probe = 0,0            # repeatable, interpolated temperature
 *     boundary_probe = -1,0  # repeatable, nodal flux at nearest boundary node
 *
 *     [exact]
 *     u = 10 + 0.2*(1 - x^2 - y^2)
 *
 *     [convergence]
 *     levels = 4
 *
 * Generator parameters (defaults in parentheses):
 *   square: n (8), side (1), material (0); inclusion with cx, cy, r,
 *           inner (1), outer (2), k_in (12), q_in (20), k_out (6), q_out (5)
 *   disk:   rings (8), radius (1), material (0)
 *   egg:    rings_per_band (2); bands carry materials 1..4
 *   any:    kx, ky, angle, q for the single default material; dirichlet
 */
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dec2d/error.hpp"
#include "dec2d/expression.hpp"
#include "dec2d/mesh.hpp"
#include "dec2d/postprocess.hpp"
#include "dec2d/system.hpp"
#include "dec2d/text.hpp"

namespace dec2d {

struct GeneratorSpec {
    std::string kind;
    std::map<std::string, double> params;
};

struct LineSpec {
    Point2 p0{};
    Point2 p1{};
    int samples{101};
};

struct ScenarioConfig {
    std::optional<std::filesystem::path> mesh_file;
    std::optional<GeneratorSpec> generator;
    MaterialTable materials;
    std::optional<double> dirichlet_value;
    std::optional<std::filesystem::path> dirichlet_file;
    std::vector<Method> methods{Method::dec, Method::feml};
    double tol{kDefaultTolerance};
    std::size_t max_iter{0};
    bool write_vtk{false};
    std::vector<LineSpec> lines;
    std::vector<Point2> probes;
    std::vector<Point2> boundary_probes;
    std::optional<std::string> exact;
    int levels{1};
};

inline std::filesystem::path read_path_base(const std::filesystem::path& config_path)
{
    return config_path.has_parent_path() ? config_path.parent_path() : std::filesystem::path(".");
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline std::vector<Method> parse_methods(std::string_view s)
{
    s = text::trim(s);
    if (s == "dec") return {Method::dec};
    if (s == "feml") return {Method::feml};
    if (s == "both") return {Method::dec, Method::feml};
    throw UsageError("method must be dec, feml or both, got '" + std::string(s) + "'");
}

/// "x0,y0,x1,y1,n"
inline LineSpec parse_line_spec(std::string_view s)
{
    const auto parts = text::split(s, ',');
    if (parts.size() != 5) throw UsageError("line must be 'x0,y0,x1,y1,n', got '" + std::string(s) + "'");
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto r = text::parse_real(parts[i]);
        if (!r || !std::isfinite(*r)) throw UsageError("bad coordinate in line '" + std::string(s) + "'");
        v[i] = *r;
    }
    const auto n = text::parse_int(parts[4]);
    if (!n || *n < 1) throw UsageError("bad sample count in line '" + std::string(s) + "'");
    return {{v[0], v[1]}, {v[2], v[3]}, static_cast<int>(*n)};
}

/// "x,y"
inline Point2 parse_point(std::string_view s)
{
    const auto parts = text::split(s, ',');
    if (parts.size() != 2) throw UsageError("point must be 'x,y', got '" + std::string(s) + "'");
    const auto x = text::parse_real(parts[0]);
    const auto y = text::parse_real(parts[1]);
    if (!x || !y) throw UsageError("bad point '" + std::string(s) + "'");
    return {*x, *y};
}

/// Parses a scenario document; relative paths resolve against `base_dir`.
inline ScenarioConfig parse_config(std::string_view content, const std::filesystem::path& base_dir = ".")
{
    ScenarioConfig cfg;
    std::string section;
    std::optional<int> material_id;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool mesh_section_seen = false;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const auto line = text::trim(text::strip_comment(content.substr(start, end - start)));
        start = end + 1;
        ++line_no;
        if (line.empty()) {
            if (end == content.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            const auto words = text::split_ws(line.substr(1, line.size() - 2));
            if (words.empty()) throw ParseError(line_no, "empty section header");
            section = std::string(words[0]);
            material_id.reset();
            if (section == "material") {
                if (words.size() != 2) throw ParseError(line_no, "expected '[material <id>]'");
                const auto id = text::parse_int(words[1]);
                if (!id) throw ParseError(line_no, "material id must be an integer");
                material_id = static_cast<int>(*id);
                if (!cfg.materials.emplace(*material_id, Material{*material_id}).second) {
                    throw ParseError(line_no, "duplicate material " + std::to_string(*material_id));
                }
            } else if (words.size() != 1) {
                throw ParseError(line_no, "unexpected words in section header");
            } else if (section == "mesh") {
                if (mesh_section_seen) throw ParseError(line_no, "duplicate [mesh] section");
                mesh_section_seen = true;
            } else if (section != "dirichlet" && section != "solver" && section != "output" && section != "exact" &&
                       section != "convergence") {
                throw ParseError(line_no, "unknown section '" + section + "'");
            }
            if (end == content.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(text::trim(line.substr(0, eq)));
        const auto value = text::trim(line.substr(eq + 1));
        auto real = [&] {
            const auto v = text::parse_real(value);
            if (!v || !std::isfinite(*v)) throw ParseError(line_no, "'" + key + "' expects a number");
            return *v;
        };
        auto integer = [&] {
            const auto v = text::parse_int(value);
            if (!v) throw ParseError(line_no, "'" + key + "' expects an integer");
            return *v;
        };
        auto boolean = [&] {
            if (value == "true" || value == "1" || value == "yes") return true;
            if (value == "false" || value == "0" || value == "no") return false;
            throw ParseError(line_no, "'" + key + "' expects true or false");
        };
        auto rethrow_usage = [&](auto&& fn) {
            try {
                return fn();
            } catch (const UsageError& e) {
                throw ParseError(line_no, e.what());
            }
        };

        if (section.empty()) throw ParseError(line_no, "key outside of a section");
        if (section == "mesh") {
            if (key == "file") {
                cfg.mesh_file = base_dir / std::filesystem::path(std::string(value));
            } else if (key == "generator") {
                if (!cfg.generator) cfg.generator.emplace();
                cfg.generator->kind = std::string(value);
            } else {
                if (!cfg.generator) cfg.generator.emplace();
                cfg.generator->params[key] = real();
            }
        } else if (section == "material") {
            auto& m = cfg.materials.at(*material_id);
            if (key == "kx") m.kx = real();
            else if (key == "ky") m.ky = real();
            else if (key == "k") m.kx = m.ky = real();
            else if (key == "angle") m.angle_deg = real();
            else if (key == "q") m.q = real();
            else throw ParseError(line_no, "unknown material key '" + key + "'");
        } else if (section == "dirichlet") {
            if (key == "value") cfg.dirichlet_value = real();
            else if (key == "file") cfg.dirichlet_file = base_dir / std::filesystem::path(std::string(value));
            else throw ParseError(line_no, "unknown dirichlet key '" + key + "'");
        } else if (section == "solver") {
            if (key == "method") cfg.methods = rethrow_usage([&] { return parse_methods(value); });
            else if (key == "tol") cfg.tol = real();
            else if (key == "max_iter") {
                const auto v = integer();
                if (v < 0) throw ParseError(line_no, "max_iter must be >= 0");
                cfg.max_iter = static_cast<std::size_t>(v);
            } else throw ParseError(line_no, "unknown solver key '" + key + "'");
        } else if (section == "output") {
            if (key == "vtk") cfg.write_vtk = boolean();
            else if (key == "line") cfg.lines.push_back(rethrow_usage([&] { return parse_line_spec(value); }));
            else if (key == "probe") cfg.probes.push_back(rethrow_usage([&] { return parse_point(value); }));
            else if (key == "boundary_probe") cfg.boundary_probes.push_back(rethrow_usage([&] { return parse_point(value); }));
            else throw ParseError(line_no, "unknown output key '" + key + "'");
        } else if (section == "exact") {
            if (key != "u") throw ParseError(line_no, "unknown exact key '" + key + "'");
            cfg.exact = std::string(value);
            (void)Expression::parse(value);
        } else if (section == "convergence") {
            if (key != "levels") throw ParseError(line_no, "unknown convergence key '" + key + "'");
            const auto v = integer();
            if (v < 1) throw ParseError(line_no, "levels must be >= 1");
            cfg.levels = static_cast<int>(v);
        }
        if (end == content.size()) break;
    }
    if (cfg.mesh_file.has_value() == cfg.generator.has_value()) {
        throw ValidationError("scenario needs exactly one mesh source ([mesh] file or generator)");
    }
    if (cfg.generator && cfg.generator->kind.empty()) throw ValidationError("[mesh] generator kind missing");
    if (cfg.dirichlet_value && cfg.dirichlet_file) {
        throw ValidationError("[dirichlet] takes either value or file, not both");
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path)
{
    return parse_config(read_text_file(path), read_path_base(path));
}

// ---------------------------------------------------------------------------
// Generators by name

/// "disk rings=2 radius=1 dirichlet=10"
inline GeneratorSpec parse_generator_spec(const std::vector<std::string>& words)
{
    if (words.empty()) throw UsageError("empty generator spec");
    GeneratorSpec spec;
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (auto token : text::split_ws(words[i])) {
            if (spec.kind.empty()) {
                spec.kind = std::string(token);
                continue;
            }
            const auto eq = token.find('=');
            if (eq == std::string_view::npos) throw UsageError("expected key=value, got '" + std::string(token) + "'");
            const auto v = text::parse_real(token.substr(eq + 1));
            if (!v || !std::isfinite(*v)) throw UsageError("bad value in '" + std::string(token) + "'");
            spec.params[std::string(token.substr(0, eq))] = *v;
        }
    }
    return spec;
}

/// A mesh with everything needed to solve on it.
struct Scenario {
    TriMesh mesh;
    MaterialTable materials;
    DirichletSet dirichlet;
    BoundaryProjector projector;
};

namespace detail {

class ParamReader {
public:
    explicit ParamReader(const GeneratorSpec& spec) : spec_(spec) {}

    double real(const std::string& key, double fallback)
    {
        used_.push_back(key);
        const auto it = spec_.params.find(key);
        return it == spec_.params.end() ? fallback : it->second;
    }

    int integer(const std::string& key, int fallback)
    {
        const double v = real(key, fallback);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(spec_.kind + ": '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    [[nodiscard]] bool has(const std::string& key) const { return spec_.params.contains(key); }

    void finish() const
    {
        for (const auto& [key, value] : spec_.params) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw UsageError(spec_.kind + ": unknown parameter '" + key + "'");
            }
        }
    }

private:
    const GeneratorSpec& spec_;
    std::vector<std::string> used_;
};

} // namespace detail

/// Builds the mesh, default materials and optional Dirichlet data of a generator.
inline Scenario build_generator(const GeneratorSpec& spec)
{
    detail::ParamReader p(spec);
    const double kx = p.real("kx", 1.0);
    const double ky = p.real("ky", 1.0);
    const double angle = p.real("angle", 0.0);
    const double q = p.real("q", 0.0);
    const bool has_dirichlet = p.has("dirichlet");
    const double dirichlet = p.real("dirichlet", 0.0);

    auto uniform = [&](int id) { return MaterialTable{{id, Material{id, kx, ky, angle, q}}}; };
    std::optional<Scenario> out;
    if (spec.kind == "square") {
        const int n = p.integer("n", 8);
        const double side = p.real("side", 1.0);
        const int material = p.integer("material", 0);
        if (p.has("r")) {
            CircleInclusion inc{{p.real("cx", side / 2), p.real("cy", side / 2)}, p.real("r", 0.0),
                                p.integer("inner", 1), p.integer("outer", 2)};
            const double k_in = p.real("k_in", 12.0), q_in = p.real("q_in", 20.0);
            const double k_out = p.real("k_out", 6.0), q_out = p.real("q_out", 5.0);
            if (inc.inside_material == inc.outside_material) throw UsageError("square: inner and outer ids must differ");
            MaterialTable mats{{inc.inside_material, Material{inc.inside_material, k_in, k_in, 0.0, q_in}},
                               {inc.outside_material, Material{inc.outside_material, k_out, k_out, 0.0, q_out}}};
            out.emplace(Scenario{gen_square(n, side, inc), std::move(mats), {}, {}});
        } else {
            out.emplace(Scenario{gen_square(n, side, std::nullopt, material), uniform(material), {}, {}});
        }
    } else if (spec.kind == "disk") {
        const int rings = p.integer("rings", 8);
        const double radius = p.real("radius", 1.0);
        const int material = p.integer("material", 0);
        out.emplace(Scenario{gen_disk(rings, radius, material), uniform(material), {}, circle_projector({0, 0}, radius)});
    } else if (spec.kind == "egg") {
        const int per_band = p.integer("rings_per_band", 2);
        out.emplace(Scenario{gen_egg(per_band), egg_materials(), {}, egg_projector()});
    } else {
        throw UsageError("unknown generator '" + spec.kind + "' (expected square, disk or egg)");
    }
    p.finish();
    validate_materials(out->mesh, out->materials);
    if (has_dirichlet) out->dirichlet = boundary_dirichlet(out->mesh, dirichlet);
    return std::move(*out);
}

/// Reads "node value" lines.
inline DirichletSet parse_dirichlet_file(std::string_view content)
{
    DirichletSet d;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const auto tokens = text::split_ws(text::strip_comment(content.substr(start, end - start)));
        start = end + 1;
        ++line_no;
        if (tokens.empty()) continue;
        if (tokens.size() != 2) throw ParseError(line_no, "expected 'node value'");
        const auto node = text::parse_int(tokens[0]);
        const auto value = text::parse_real(tokens[1]);
        if (!node || *node < 0 || !value) throw ParseError(line_no, "expected 'node value'");
        d[static_cast<NodeIndex>(*node)] = *value;
    }
    return d;
}

/// Resolves the mesh source, merges materials and Dirichlet data.
inline Scenario load_scenario(const ScenarioConfig& cfg)
{
    std::optional<Scenario> sc;
    if (cfg.mesh_file) {
        auto data = parse_mesh(read_text_file(*cfg.mesh_file));
        sc.emplace(Scenario{std::move(data.mesh), std::move(data.materials), std::move(data.dirichlet), {}});
    } else {
        sc.emplace(build_generator(*cfg.generator));
    }
    for (const auto& [id, m] : cfg.materials) sc->materials[id] = m;
    if (cfg.dirichlet_value) sc->dirichlet = boundary_dirichlet(sc->mesh, *cfg.dirichlet_value);
    if (cfg.dirichlet_file) sc->dirichlet = parse_dirichlet_file(read_text_file(*cfg.dirichlet_file));
    validate_materials(sc->mesh, sc->materials);
    validate_dirichlet(sc->mesh, sc->dirichlet);
    if (sc->dirichlet.empty()) throw ValidationError("scenario has no Dirichlet nodes");
    return std::move(*sc);
}

/**
 * Refines the scenario mesh; new boundary midpoints take the mean of their
 * edge endpoints' prescribed values when both are fixed.
 */
inline Scenario refine_scenario(const Scenario& sc)
{
    TriMesh fine = refine(sc.mesh, sc.projector);
    DirichletSet d = sc.dirichlet;
    const auto base = sc.mesh.node_count();
    const auto& edges = sc.mesh.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].incident != 1) continue;
        const auto a = sc.dirichlet.find(edges[e].nodes[0]);
        const auto b = sc.dirichlet.find(edges[e].nodes[1]);
        if (a != sc.dirichlet.end() && b != sc.dirichlet.end()) d[base + e] = 0.5 * (a->second + b->second);
    }
    return {std::move(fine), sc.materials, std::move(d), sc.projector};
}

// ---------------------------------------------------------------------------
// Solve driver

/// FNV-1a over (row, col, value rounded to 1e-8 of the largest magnitude).
inline std::uint64_t quantized_hash(const SparseSym& m)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    const double quantum = m.max_abs() > 0 ? 1e-8 * m.max_abs() : 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (auto k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
            mix(i);
            mix(m.cols()[k]);
            mix(static_cast<std::uint64_t>(std::llround(m.values()[k] / quantum)));
        }
    }
    return h;
}

inline std::uint64_t quantized_hash(std::span<const double> v)
{
    std::uint64_t h = 1469598103934665603ull;
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double quantum = scale > 0 ? 1e-8 * scale : 1.0;
    for (double x : v) {
        const auto q = static_cast<std::uint64_t>(std::llround(x / quantum));
        for (int b = 0; b < 8; ++b) {
            h ^= (q >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

struct ProbeValue {
    Point2 point{};
    std::optional<double> value;
};

struct BoundaryProbeValue {
    Point2 target{};
    NodeIndex node{0};
    Point2 node_point{};
    double flux_magnitude{0.0};
};

struct MethodResult {
    Method method{Method::dec};
    SparseSym stiffness;            ///< assembled, before boundary conditions
    std::vector<double> load;       ///< assembled, before boundary conditions
    std::vector<double> solution;
    SolveStats stats;
    std::vector<Point2> element_flux;
    std::vector<double> nodal_flux;
    double max_temperature{0.0};
    double min_temperature{0.0};
    double max_nodal_flux{0.0};
    double max_element_flux{0.0};
    std::vector<ProbeValue> probes;
    std::vector<BoundaryProbeValue> boundary_probes;
    std::optional<ErrorNorms> errors;
    double seconds{0.0};            ///< wall time; never written to reports
};

struct SolveOptions {
    std::vector<Method> methods{Method::dec, Method::feml};
    double tol{kDefaultTolerance};
    std::size_t max_iter{0};
    std::vector<Point2> probes;
    std::vector<Point2> boundary_probes;
    std::optional<std::string> exact;
};

inline SolveOptions solve_options(const ScenarioConfig& cfg)
{
    return {cfg.methods, cfg.tol, cfg.max_iter, cfg.probes, cfg.boundary_probes, cfg.exact};
}

inline MethodResult solve_method(const Scenario& sc, Method method, const SolveOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    MethodResult r;
    r.method = method;
    auto sys = assemble(sc.mesh, sc.materials, method);
    r.stiffness = sys.matrix;
    r.load = sys.rhs;
    sys.fixed = sc.dirichlet;
    auto solved = solve_cg(apply_dirichlet(std::move(sys)), opt.tol, opt.max_iter);
    r.solution = std::move(solved.solution);
    r.stats = solved.stats;

    const ScalarField u(sc.mesh, r.solution);
    const auto flux = element_fluxes(sc.mesh, sc.materials, u);
    const auto nodal = nodal_flux_magnitude(flux);
    r.element_flux = flux.vectors;
    r.nodal_flux = nodal.values;
    r.max_temperature = *std::max_element(r.solution.begin(), r.solution.end());
    r.min_temperature = *std::min_element(r.solution.begin(), r.solution.end());
    r.max_nodal_flux = *std::max_element(r.nodal_flux.begin(), r.nodal_flux.end());
    for (const auto& w : r.element_flux) r.max_element_flux = std::max(r.max_element_flux, norm(w));
    for (const auto& p : opt.probes) r.probes.push_back({p, probe(u, p)});
    for (const auto& p : opt.boundary_probes) {
        const auto n = nearest_node(sc.mesh, p, true);
        r.boundary_probes.push_back({p, n, sc.mesh.points()[n], r.nodal_flux[n]});
    }
    if (opt.exact) {
        const auto expr = Expression::parse(*opt.exact);
        r.errors = error_norms(u, [&](const Point2& p) { return expr(p); });
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct MethodComparison {
    double stiffness_max_rel_diff{0.0};
    double load_max_abs_diff{0.0};
    double solution_max_abs_diff{0.0};
    bool stiffness_hash_equal{false};
    bool load_hash_equal{false};
};

inline MethodComparison compare_methods(const MethodResult& a, const MethodResult& b)
{
    MethodComparison c;
    const double scale = std::max(a.stiffness.max_abs(), 1e-300);
    if (a.stiffness.nonzeros() != b.stiffness.nonzeros()) {
        c.stiffness_max_rel_diff = std::numeric_limits<double>::infinity();
    } else {
        for (std::size_t k = 0; k < a.stiffness.nonzeros(); ++k) {
            c.stiffness_max_rel_diff =
                std::max(c.stiffness_max_rel_diff, std::abs(a.stiffness.values()[k] - b.stiffness.values()[k]) / scale);
        }
    }
    for (std::size_t i = 0; i < a.load.size(); ++i) {
        c.load_max_abs_diff = std::max(c.load_max_abs_diff, std::abs(a.load[i] - b.load[i]));
        c.solution_max_abs_diff = std::max(c.solution_max_abs_diff, std::abs(a.solution[i] - b.solution[i]));
    }
    c.stiffness_hash_equal = quantized_hash(a.stiffness) == quantized_hash(b.stiffness);
    c.load_hash_equal = quantized_hash(a.load) == quantized_hash(b.load);
    return c;
}

struct SolveOutcome {
    std::size_t nodes{0};
    std::size_t elements{0};
    std::size_t boundary_nodes{0};
    std::size_t dirichlet_nodes{0};
    std::size_t reoriented{0};
    double area{0.0};
    std::vector<MethodResult> results;
    std::optional<MethodComparison> comparison;

    [[nodiscard]] bool all_converged() const
    {
        return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.stats.converged; });
    }
};

inline SolveOutcome run_solve(const Scenario& sc, const SolveOptions& opt)
{
    if (opt.methods.empty()) throw UsageError("no method selected");
    SolveOutcome out;
    out.nodes = sc.mesh.node_count();
    out.elements = sc.mesh.triangle_count();
    out.boundary_nodes = sc.mesh.boundary_nodes().size();
    out.dirichlet_nodes = sc.dirichlet.size();
    out.reoriented = sc.mesh.reoriented();
    out.area = sc.mesh.total_area();
    for (auto m : opt.methods) out.results.push_back(solve_method(sc, m, opt));
    if (out.results.size() == 2) out.comparison = compare_methods(out.results[0], out.results[1]);
    return out;
}

namespace detail {

inline std::string num(double v) { return text::format_sig(v, 10); }

inline std::string hex(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string point_str(const Point2& p) { return "(" + num(p.x) + "," + num(p.y) + ")"; }

} // namespace detail

/// Deterministic text report of a solve (no timings).
inline std::string format_solve_report(const SolveOutcome& o)
{
    using detail::num;
    std::ostringstream os;
    os << "# dec2d solve report\n";
    os << "nodes = " << o.nodes << '\n';
    os << "elements = " << o.elements << '\n';
    os << "boundary_nodes = " << o.boundary_nodes << '\n';
    os << "dirichlet_nodes = " << o.dirichlet_nodes << '\n';
    os << "reoriented = " << o.reoriented << '\n';
    os << "area = " << num(o.area) << '\n';
    for (const auto& r : o.results) {
        os << "\n[" << to_string(r.method) << "]\n";
        os << "converged = " << (r.stats.converged ? "true" : "false") << '\n';
        os << "iterations = " << r.stats.iterations << '\n';
        os << "residual = " << text::format_sig(r.stats.final_residual, 3) << '\n';
        os << "max_temperature = " << num(r.max_temperature) << '\n';
        os << "min_temperature = " << num(r.min_temperature) << '\n';
        os << "max_nodal_flux = " << num(r.max_nodal_flux) << '\n';
        os << "max_element_flux = " << num(r.max_element_flux) << '\n';
        os << "stiffness_hash = " << detail::hex(quantized_hash(r.stiffness)) << '\n';
        os << "rhs_hash = " << detail::hex(quantized_hash(r.load)) << '\n';
        for (const auto& p : r.probes) {
            os << "temperature" << detail::point_str(p.point) << " = " << (p.value ? num(*p.value) : "outside") << '\n';
        }
        for (const auto& b : r.boundary_probes) {
            os << "boundary_flux" << detail::point_str(b.target) << " = " << num(b.flux_magnitude) << "  # node "
               << b.node << " at " << detail::point_str(b.node_point) << '\n';
        }
        if (r.errors) {
            os << "linf_error = " << text::format_sig(r.errors->linf, 6) << '\n';
            os << "l2_error = " << text::format_sig(r.errors->l2, 6) << '\n';
        }
    }
    if (o.comparison) {
        const auto& c = *o.comparison;
        os << "\n[comparison]\n";
        os << "stiffness_max_rel_diff = " << text::format_sig(c.stiffness_max_rel_diff, 3) << '\n';
        os << "stiffness_hashes_equal = " << (c.stiffness_hash_equal ? "true" : "false") << '\n';
        os << "rhs_max_abs_diff = " << text::format_sig(c.load_max_abs_diff, 6) << '\n';
        os << "rhs_hashes_equal = " << (c.load_hash_equal ? "true" : "false") << '\n';
        os << "solution_max_abs_diff = " << text::format_sig(c.solution_max_abs_diff, 6) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Convergence driver

struct ConvergenceRow {
    int level{0};
    std::size_t nodes{0};
    std::size_t elements{0};
    Method method{Method::dec};
    MethodResult result;
    std::optional<double> order_linf;
    std::optional<double> order_l2;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    [[nodiscard]] std::vector<const ConvergenceRow*> for_method(Method m) const
    {
        std::vector<const ConvergenceRow*> out;
        for (const auto& r : rows)
            if (r.method == m) out.push_back(&r);
        return out;
    }

    [[nodiscard]] bool all_converged() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.result.stats.converged; });
    }
};

/// Solves on `levels` successive uniform refinements of the scenario mesh.
inline ConvergenceTable run_convergence(const Scenario& base, const SolveOptions& opt, int levels)
{
    if (levels < 1) throw UsageError("levels must be >= 1");
    if (opt.methods.empty()) throw UsageError("no method selected");
    ConvergenceTable table;
    std::optional<Scenario> current;
    for (int level = 0; level < levels; ++level) {
        const Scenario& sc = level == 0 ? base : *current;
        for (auto m : opt.methods) {
            ConvergenceRow row{level, sc.mesh.node_count(), sc.mesh.triangle_count(), m, solve_method(sc, m, opt), {}, {}};
            // Drop the bulky per-node data, only scalars are tabulated.
            row.result.stiffness = {};
            row.result.element_flux.clear();
            if (level > 0 && row.result.errors) {
                const auto prev = table.for_method(m).back();
                if (prev->result.errors) {
                    const auto& e0 = *prev->result.errors;
                    const auto& e1 = *row.result.errors;
                    if (e0.linf > 0 && e1.linf > 0) row.order_linf = std::log2(e0.linf / e1.linf);
                    if (e0.l2 > 0 && e1.l2 > 0) row.order_l2 = std::log2(e0.l2 / e1.l2);
                }
            }
            table.rows.push_back(std::move(row));
        }
        if (level + 1 < levels) current = refine_scenario(sc);
    }
    return table;
}

inline std::string format_convergence_report(const ConvergenceTable& t)
{
    using detail::num;
    std::ostringstream os;
    os << "# dec2d convergence report\n";
    os << "# level nodes elements method iterations max_temperature max_nodal_flux";
    const bool has_probes = !t.rows.empty() && !t.rows.front().result.probes.empty();
    const bool has_bprobes = !t.rows.empty() && !t.rows.front().result.boundary_probes.empty();
    const bool has_errors = !t.rows.empty() && t.rows.front().result.errors.has_value();
    if (has_probes)
        for (const auto& p : t.rows.front().result.probes) os << " temperature" << detail::point_str(p.point);
    if (has_bprobes)
        for (const auto& b : t.rows.front().result.boundary_probes) os << " boundary_flux" << detail::point_str(b.target);
    if (has_errors) os << " linf_error l2_error order_linf order_l2";
    os << '\n';
    for (const auto& r : t.rows) {
        os << r.level << ' ' << r.nodes << ' ' << r.elements << ' ' << to_string(r.method) << ' '
           << r.result.stats.iterations << ' ' << num(r.result.max_temperature) << ' ' << num(r.result.max_nodal_flux);
        for (const auto& p : r.result.probes) os << ' ' << (p.value ? num(*p.value) : "outside");
        for (const auto& b : r.result.boundary_probes) os << ' ' << num(b.flux_magnitude);
        if (r.result.errors) {
            os << ' ' << text::format_sig(r.result.errors->linf, 6) << ' ' << text::format_sig(r.result.errors->l2, 6);
            os << ' ' << (r.order_linf ? text::format_sig(*r.order_linf, 4) : "-");
            os << ' ' << (r.order_l2 ? text::format_sig(*r.order_l2, 4) : "-");
        }
        os << '\n';
    }
    return os.str();
}

} // namespace dec2d
