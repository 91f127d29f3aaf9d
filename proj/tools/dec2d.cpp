// dec2d command-line tool: solve, convergence, sample and meshgen.
//
// Exit codes: 0 success, 1 usage, 2 data/validation, 3 solver failure
// (including a solve that did not converge).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dec2d.hpp"

namespace fs = std::filesystem;
using namespace dec2d;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kSolver = 3 };

struct CommonOptions {
    std::string config;
    std::optional<std::string> method;
    std::optional<double> tol;
    std::optional<std::string> out;
    std::vector<std::string> lines;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config, "scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--method", o.method, "dec, feml or both")->check(CLI::IsMember({"dec", "feml", "both"}));
    cmd->add_option("--tol", o.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--line", o.lines, "sample segment \"x0,y0,x1,y1,n\" (repeatable)");
}

ScenarioConfig load_with_overrides(const CommonOptions& o)
{
    auto cfg = load_config(o.config);
    if (o.method) cfg.methods = parse_methods(*o.method);
    if (o.tol) cfg.tol = *o.tol;
    for (const auto& l : o.lines) cfg.lines.push_back(parse_line_spec(l));
    return cfg;
}

fs::path ensure_dir(const std::string& dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error("cannot create directory '" + dir + "'");
    return p;
}

void report_timing(const std::vector<MethodResult>& results)
{
    for (const auto& r : results) {
        std::cerr << "time[" << to_string(r.method) << "] = " << text::format_sig(r.seconds, 4) << " s\n";
    }
}

std::vector<std::string> write_samples(const fs::path& dir, const Scenario& sc, const MethodResult& r,
                                       const std::vector<LineSpec>& lines)
{
    std::vector<std::string> written;
    const ScalarField u(sc.mesh, r.solution);
    const FluxField flux(sc.mesh, r.element_flux);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto& l = lines[k];
        const std::string stem = std::string(to_string(r.method)) + "_line" + std::to_string(k);
        const auto temp = (dir / (stem + "_temperature.csv")).string();
        const auto fl = (dir / (stem + "_flux.csv")).string();
        write_file(temp, [&](std::ostream& os) { write_csv(os, sample_line(u, l.p0, l.p1, l.samples)); });
        write_file(fl, [&](std::ostream& os) { write_csv(os, sample_line(flux, l.p0, l.p1, l.samples)); });
        written.push_back(temp);
        written.push_back(fl);
    }
    return written;
}

void write_vtk_file(const fs::path& dir, const Scenario& sc, const MethodResult& r)
{
    const auto path = (dir / (std::string(to_string(r.method)) + ".vtk")).string();
    write_file(path, [&](std::ostream& os) {
        write_vtk(os, sc.mesh, {{"temperature", r.solution}, {"flux_magnitude", r.nodal_flux}},
                  {{"flux", r.element_flux}});
    });
}

int cmd_solve(const CommonOptions& o)
{
    const auto cfg = load_with_overrides(o);
    const auto sc = load_scenario(cfg);
    const auto outcome = run_solve(sc, solve_options(cfg));
    const auto report = format_solve_report(outcome);
    std::cout << report;
    report_timing(outcome.results);
    if (o.out) {
        const auto dir = ensure_dir(*o.out);
        write_file((dir / "report.txt").string(), [&](std::ostream& os) { os << report; });
        for (const auto& r : outcome.results) {
            if (cfg.write_vtk) write_vtk_file(dir, sc, r);
            write_samples(dir, sc, r, cfg.lines);
        }
    }
    return outcome.all_converged() ? kOk : kSolver;
}

int cmd_sample(const CommonOptions& o)
{
    const auto cfg = load_with_overrides(o);
    if (cfg.lines.empty()) throw UsageError("sample needs at least one --line or [output] line");
    const auto sc = load_scenario(cfg);
    const auto outcome = run_solve(sc, solve_options(cfg));
    const auto dir = ensure_dir(o.out.value_or("."));
    for (const auto& r : outcome.results) {
        for (const auto& f : write_samples(dir, sc, r, cfg.lines)) std::cout << f << '\n';
    }
    return outcome.all_converged() ? kOk : kSolver;
}

int cmd_convergence(const CommonOptions& o, std::optional<int> levels)
{
    auto cfg = load_with_overrides(o);
    if (levels) cfg.levels = *levels;
    const auto sc = load_scenario(cfg);
    const auto table = run_convergence(sc, solve_options(cfg), cfg.levels);
    const auto report = format_convergence_report(table);
    std::cout << report;
    for (const auto& row : table.rows) {
        std::cerr << "time[level " << row.level << ' ' << to_string(row.method)
                  << "] = " << text::format_sig(row.result.seconds, 4) << " s\n";
    }
    if (o.out) {
        const auto dir = ensure_dir(*o.out);
        write_file((dir / "convergence.txt").string(), [&](std::ostream& os) { os << report; });
    }
    return table.all_converged() ? kOk : kSolver;
}

int cmd_meshgen(const std::vector<std::string>& words, const std::optional<std::string>& out)
{
    const auto spec = parse_generator_spec(words);
    const auto sc = build_generator(spec);
    const auto content = write_mesh_string(sc.mesh, sc.materials, sc.dirichlet);
    if (out) {
        const auto dir = ensure_dir(*out);
        const auto path = (dir / (spec.kind + ".mesh")).string();
        write_file(path, [&](std::ostream& os) { os << content; });
        std::cout << path << '\n';
    } else {
        std::cout << content;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Anisotropic Poisson solver on triangle meshes (DEC and linear FEM)"};
    app.require_subcommand(1);

    CommonOptions solve_opts, conv_opts, sample_opts;
    auto* solve = app.add_subcommand("solve", "solve a scenario and print a report");
    add_common(solve, solve_opts);

    auto* conv = app.add_subcommand("convergence", "solve on successive uniform refinements");
    add_common(conv, conv_opts);
    std::optional<int> levels;
    conv->add_option("--levels", levels, "number of refinement levels")->check(CLI::PositiveNumber);

    auto* sample = app.add_subcommand("sample", "write temperature and flux along segments as CSV");
    add_common(sample, sample_opts);

    auto* meshgen = app.add_subcommand("meshgen", "generate a mesh file, e.g. 'disk rings=2 dirichlet=10'");
    std::vector<std::string> spec_words;
    std::optional<std::string> meshgen_out;
    meshgen->add_option("spec", spec_words, "generator kind followed by key=value parameters")->required();
    meshgen->add_option("--out", meshgen_out, "output directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*solve) return cmd_solve(solve_opts);
        if (*conv) return cmd_convergence(conv_opts, levels);
        if (*sample) return cmd_sample(sample_opts);
        if (*meshgen) return cmd_meshgen(spec_words, meshgen_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const SingularSystemError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const NumericalBreakdown& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}
