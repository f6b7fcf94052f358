#include "smectic/report.hpp"

#include "smectic/error.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace smectic {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ReportError("cannot open '" + path.string() + "' for writing");
    }
    out << std::setprecision(17);
    return out;
}

void finish(std::ofstream& out, const fs::path& path)
{
    out.flush();
    if (!out) {
        throw ReportError("write to '" + path.string() + "' failed");
    }
}

void prepare_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ReportError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

// Meshes 0..levels-1 by uniform refinement of the 4-element mesh.
template <class Fn>
void for_each_level(int levels, Fn&& fn)
{
    Mesh mesh = unit_square_crisscross();
    for (int l = 0; l < levels; ++l) {
        fn(l, std::make_shared<const Mesh>(mesh));
        if (l + 1 < levels) {
            mesh = refine_uniform(mesh);
        }
    }
}

std::vector<std::string> level_cells(int level, int num_triangles, double h)
{
    return {std::to_string(level), std::to_string(num_triangles), CsvTable::number(h)};
}

} // namespace

std::vector<std::optional<double>> eoc_sequence(const std::vector<double>& errors)
{
    std::vector<std::optional<double>> out(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double r = errors[k - 1] / errors[k];
        if (std::isfinite(r) && r > 0.0) {
            out[k] = std::log2(r);
        }
    }
    return out;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns_.size()) {
        throw ReportError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::size_t CsvTable::column_index(const std::string& name) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == name) {
            return i;
        }
    }
    throw ReportError("CSV has no column '" + name + "'");
}

void CsvTable::check_eoc(const std::string& err_col, const std::string& eoc_col) const
{
    const std::size_t ie = column_index(err_col);
    const std::size_t io = column_index(eoc_col);
    std::vector<double> errs;
    for (const auto& r : rows_) {
        errs.push_back(std::stod(r[ie]));
    }
    const auto eoc = eoc_sequence(errs);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        const std::string& cell = rows_[k][io];
        const bool ok = eoc[k] ? (!cell.empty() && std::abs(std::stod(cell) - *eoc[k]) <= 1e-12 * (1.0 + std::abs(*eoc[k])))
                               : cell.empty();
        if (!ok) {
            throw ReportError("CSV column " + eoc_col + " is inconsistent with " + err_col + " in row " +
                              std::to_string(k));
        }
    }
}

void CsvTable::write(const fs::path& path) const
{
    std::ofstream out = open_output(path);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out << (i ? "," : "") << columns_[i];
    }
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << r[i];
        }
        out << '\n';
    }
    finish(out, path);
}

std::string CsvTable::number(double v)
{
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::string CsvTable::number(const std::optional<double>& v)
{
    return v ? number(*v) : std::string();
}

CornerVectorFn director_at_corners(const Mesh& mesh, const numerics::VectorFn& nu)
{
    return [&mesh, nu](int t, int c) {
        const auto pts = mesh.triangle_points(t);
        const Vec2 centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
        const Vec2& p = pts[static_cast<std::size_t>(c)];
        return numerics::evaluate(nu, p + 1e-9 * (centroid - p));
    };
}

CornerVectorFn angle_director_at_corners(const P2Space& space, const Eigen::VectorXd& phi)
{
    return [&space, &phi](int t, int c) {
        const auto d = space.local_dofs(t);
        const double a = phi(d[static_cast<std::size_t>(c)]);
        return Vec2(std::cos(a), std::sin(a));
    };
}

void write_vtk_p1(const fs::path& path, const Mesh& mesh, const P1Field& u, const std::string& name,
                  const CornerVectorFn& director)
{
    std::ofstream out = open_output(path);
    const int nt = mesh.num_triangles();
    out << "# vtk DataFile Version 3.0\n" << name << " (discontinuous P1)\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 3 * nt << " double\n";
    for (int t = 0; t < nt; ++t) {
        for (const Vec2& p : mesh.triangle_points(t)) {
            out << p.x() << ' ' << p.y() << " 0\n";
        }
    }
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < nt; ++t) {
        out << "3 " << 3 * t << ' ' << 3 * t + 1 << ' ' << 3 * t + 2 << '\n';
    }
    out << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) {
        out << "5\n";
    }
    out << "POINT_DATA " << 3 * nt << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    const std::array<Vec2, 3> corners{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    for (int t = 0; t < nt; ++t) {
        for (const Vec2& c : corners) {
            out << u.value(t, c) << '\n';
        }
    }
    if (director) {
        out << "VECTORS nu double\n";
        for (int t = 0; t < nt; ++t) {
            for (int c = 0; c < 3; ++c) {
                const Vec2 nu = director(t, c);
                out << nu.x() << ' ' << nu.y() << " 0\n";
            }
        }
    }
    finish(out, path);
}

void write_vtk_p2_angle(const fs::path& path, const P2Space& space, const Eigen::VectorXd& phi)
{
    if (phi.size() != space.num_dofs()) {
        throw ReportError("write_vtk_p2_angle: coefficient vector does not match the P2 space");
    }
    const Mesh& mesh = space.mesh();
    const int np = space.num_dofs();
    const int nt = 4 * mesh.num_triangles();
    std::ofstream out = open_output(path);
    out << "# vtk DataFile Version 3.0\nphi (P2 nodes, subdivided)\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << np << " double\n";
    for (int d = 0; d < np; ++d) {
        const Vec2 p = space.node(d);
        out << p.x() << ' ' << p.y() << " 0\n";
    }
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto d = space.local_dofs(t);
        // vertices d[0..2]; midpoint d[3+i] on edge (i, i+1)
        out << "3 " << d[0] << ' ' << d[3] << ' ' << d[5] << '\n';
        out << "3 " << d[3] << ' ' << d[1] << ' ' << d[4] << '\n';
        out << "3 " << d[5] << ' ' << d[4] << ' ' << d[2] << '\n';
        out << "3 " << d[3] << ' ' << d[4] << ' ' << d[5] << '\n';
    }
    out << "CELL_TYPES " << nt << '\n';
    for (int t = 0; t < nt; ++t) {
        out << "5\n";
    }
    out << "POINT_DATA " << np << "\nSCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (int d = 0; d < np; ++d) {
        out << phi(d) << '\n';
    }
    out << "VECTORS nu double\n";
    for (int d = 0; d < np; ++d) {
        out << std::cos(phi(d)) << ' ' << std::sin(phi(d)) << " 0\n";
    }
    finish(out, path);
}

void RunConfig::validate() const
{
    if (levels < 1) {
        throw ConfigurationError("levels must be at least 1");
    }
    if (out_dir.empty()) {
        throw ConfigurationError("output directory must not be empty");
    }
    uzawa.validate();
    if (disc.quad_degree < 4) {
        throw ConfigurationError("quadrature degree must be at least 4");
    }
    if (disc.edge_points < 2) {
        throw ConfigurationError("edge quadrature needs at least 2 points");
    }
}

void write_manifest(const RunConfig& config, const Case& c, const std::string& command)
{
    prepare_dir(config.out_dir);
    const fs::path path = config.out_dir / "manifest.txt";
    std::ofstream out = open_output(path);
    out << "command = " << command << '\n'
        << "case = " << c.name << '\n'
        << "kind = " << (c.kind == CaseKind::Linear ? "linear" : "nonlinear") << '\n'
        << "m = " << c.params.m << '\n'
        << "B = " << c.params.B << '\n'
        << "q = " << c.params.q << '\n'
        << "K = " << c.params.K << '\n'
        << "boundary = " << to_string(c.boundary) << '\n'
        << "levels = " << config.levels << '\n'
        << "initial_mesh = unit square, 4 triangles (both diagonals)\n"
        << "refinement = uniform red refinement (4 children per triangle)\n"
        << "quad_degree = " << config.disc.quad_degree << '\n'
        << "edge_points = " << config.disc.edge_points << '\n'
        << "solver_tol = " << config.disc.solver_tol << '\n';
    if (c.kind == CaseKind::Nonlinear) {
        out << "alpha = " << config.uzawa.alpha << '\n'
            << "tol_M = " << config.uzawa.tol_M << '\n'
            << "tol_phi = " << config.uzawa.tol_phi << '\n'
            << "max_outer = " << config.uzawa.max_outer << '\n'
            << "max_inner = " << config.uzawa.max_inner << '\n'
            << "poisson_quad_degree = " << config.uzawa.poisson_degree << '\n'
            << "phi_init = harmonic extension of the boundary L2 projection of eta\n";
    }
    out << "zero_load = " << (config.overrides.zero_load ? "true" : "false") << '\n'
        << "determinism = no random numbers are used; results depend only on the parameters above\n";
    finish(out, path);
}

std::vector<LinearLevel> run_linear_convergence(const RunConfig& config)
{
    config.validate();
    const Case c = case_by_name(config.case_name, config.overrides);
    if (c.kind != CaseKind::Linear) {
        throw ConfigurationError("case " + c.name + " is nonlinear; use the nonlinear command");
    }
    if (!c.exact_u) {
        throw ConfigurationError("case " + c.name +
                                 " has no exact solution; use linear-field for Aitken-based error estimates");
    }
    const LinearProblem lp = c.linear_problem();
    ElementCache cache;
    std::vector<LinearLevel> out;
    for_each_level(config.levels, [&](int l, const std::shared_ptr<const Mesh>& mesh) {
        const ClassifiedMesh cm = classify_boundary(mesh, c.boundary_spec(*mesh));
        const LinearSolution sol = solve_linear(cm, cache, lp, config.disc);
        LinearLevel lev;
        lev.level = l;
        lev.num_triangles = mesh->num_triangles();
        lev.h = mesh->mesh_size();
        lev.errors = compute_errors(sol, lp, *c.exact_u);
        lev.norm_divdiv = sol.norm_divdiv;
        lev.galerkin_defect =
            std::abs(lev.errors.error_norm_sq - (lev.errors.exact_norm_sq - lev.errors.discrete_norm_sq)) /
            lev.errors.exact_norm_sq;
        const double lhs = c.params.m * lev.errors.err_util;
        lev.identity_defect =
            lev.errors.err_divdiv > 0.0 ? std::abs(lhs - lev.errors.err_divdiv) / lev.errors.err_divdiv : lhs;
        lev.solve = sol.solve_stats;
        out.push_back(lev);
    });

    prepare_dir(config.out_dir);
    CsvTable table({"level", "num_triangles", "h", "err_L2", "err_divdiv", "err_u", "eoc_L2", "eoc_divdiv", "eoc_u",
                    "galerkin_defect", "identity_defect", "solver_residual"});
    std::vector<double> e1;
    std::vector<double> e2;
    std::vector<double> e3;
    for (const auto& l : out) {
        e1.push_back(l.errors.err_L2);
        e2.push_back(l.errors.err_divdiv);
        e3.push_back(l.errors.err_u);
    }
    const auto o1 = eoc_sequence(e1);
    const auto o2 = eoc_sequence(e2);
    const auto o3 = eoc_sequence(e3);
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto cells = level_cells(out[k].level, out[k].num_triangles, out[k].h);
        for (const auto& v : {CsvTable::number(e1[k]), CsvTable::number(e2[k]), CsvTable::number(e3[k]),
                              CsvTable::number(o1[k]), CsvTable::number(o2[k]), CsvTable::number(o3[k]),
                              CsvTable::number(out[k].galerkin_defect), CsvTable::number(out[k].identity_defect),
                              CsvTable::number(out[k].solve.relative_residual)}) {
            cells.push_back(v);
        }
        table.add_row(std::move(cells));
    }
    table.check_eoc("err_L2", "eoc_L2");
    table.check_eoc("err_divdiv", "eoc_divdiv");
    table.check_eoc("err_u", "eoc_u");
    table.write(config.out_dir / "errors.csv");
    return out;
}

FieldRun run_linear_field(const RunConfig& config)
{
    config.validate();
    if (config.levels < 3) {
        throw ConfigurationError("linear-field needs at least 3 levels for the Aitken extrapolation");
    }
    const Case c = case_by_name(config.case_name, config.overrides);
    if (c.kind != CaseKind::Linear) {
        throw ConfigurationError("case " + c.name + " is nonlinear; use the nonlinear command");
    }
    const LinearProblem lp = c.linear_problem();
    ElementCache cache;
    FieldRun run;
    std::vector<double> norms;
    for_each_level(config.levels, [&](int l, const std::shared_ptr<const Mesh>& mesh) {
        const ClassifiedMesh cm = classify_boundary(mesh, c.boundary_spec(*mesh));
        const LinearSolution sol = solve_linear(cm, cache, lp, config.disc);
        run.levels.push_back({l, mesh->num_triangles(), mesh->mesh_size(), sol.norm_divdiv, std::sqrt(sol.u_norm_sq),
                              sol.solve_stats});
        norms.push_back(sol.norm_divdiv);
        if (config.write_fields && l + 1 == config.levels) {
            prepare_dir(config.out_dir);
            write_vtk_p1(config.out_dir / "u_h.vtk", *mesh, sol.u, "u_h",
                         c.director ? director_at_corners(*mesh, *c.director) : CornerVectorFn{});
        }
    });
    run.errors = energy_error_sequence(norms);
    run.eoc = eoc_sequence(run.errors.error);

    prepare_dir(config.out_dir);
    CsvTable table({"level", "num_triangles", "h", "norm_divdiv", "err", "eoc", "clamped"});
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
        const auto& l = run.levels[k];
        auto cells = level_cells(l.level, l.num_triangles, l.h);
        cells.push_back(CsvTable::number(l.norm_divdiv));
        cells.push_back(CsvTable::number(run.errors.error[k]));
        cells.push_back(CsvTable::number(run.eoc[k]));
        cells.push_back(run.errors.clamped[k] ? "1" : "0");
        table.add_row(std::move(cells));
    }
    table.check_eoc("err", "eoc");
    table.write(config.out_dir / "norms.csv");
    return run;
}

NonlinearRun run_nonlinear(const RunConfig& config)
{
    config.validate();
    const Case c = case_by_name(config.case_name, config.overrides);
    if (c.kind != CaseKind::Nonlinear) {
        throw ConfigurationError("case " + c.name + " is linear; use linear-convergence or linear-field");
    }
    const NonlinearProblem np = c.nonlinear_problem();
    const bool manufactured = c.exact_u && c.exact_phi;
    ElementCache cache;
    NonlinearRun run;
    for_each_level(config.levels, [&](int l, const std::shared_ptr<const Mesh>& mesh) {
        const ClassifiedMesh cm = classify_boundary(mesh, c.boundary_spec(*mesh));
        const NonlinearSolution sol = uzawa_solve(cm, cache, np, config.uzawa, config.disc);
        NonlinearLevel lev;
        lev.level = l;
        lev.num_triangles = mesh->num_triangles();
        lev.h = mesh->mesh_size();
        lev.energy = sol.energy;
        lev.log = sol.log;
        if (manufactured) {
            lev.errors = compute_nonlinear_errors(sol, *c.exact_u, *c.exact_phi);
        }
        run.levels.push_back(std::move(lev));
        if (config.write_fields && l + 1 == config.levels) {
            prepare_dir(config.out_dir);
            write_vtk_p1(config.out_dir / "u_h.vtk", *mesh, sol.u, "u_h",
                         angle_director_at_corners(*sol.angle_space, sol.phi));
            write_vtk_p2_angle(config.out_dir / "phi_h.vtk", *sol.angle_space, sol.phi);
        }
    });

    prepare_dir(config.out_dir);
    CsvTable iters({"level", "num_triangles", "outer", "inner_total", "inner_mean", "res_M_final", "status"});
    for (const auto& l : run.levels) {
        iters.add_row({std::to_string(l.level), std::to_string(l.num_triangles), std::to_string(l.log.num_outer()),
                       std::to_string(l.log.inner_total()), CsvTable::number(l.log.inner_mean()),
                       CsvTable::number(l.log.final_res_M()), to_string(l.log.status)});
    }
    iters.write(config.out_dir / "iterations.csv");

    if (manufactured) {
        const std::array<const char*, 4> names{"L2", "divdiv", "u", "phi"};
        std::array<std::vector<double>, 4> errs;
        for (const auto& l : run.levels) {
            errs[0].push_back(l.errors->err_L2);
            errs[1].push_back(l.errors->err_divdiv);
            errs[2].push_back(l.errors->err_u);
            errs[3].push_back(l.errors->err_phi);
        }
        std::vector<std::string> cols{"level", "num_triangles", "h"};
        for (const char* n : names) {
            cols.push_back(std::string("err_") + n);
        }
        for (const char* n : names) {
            cols.push_back(std::string("eoc_") + n);
        }
        CsvTable table(cols);
        std::array<std::vector<std::optional<double>>, 4> eocs;
        for (std::size_t i = 0; i < 4; ++i) {
            eocs[i] = eoc_sequence(errs[i]);
        }
        for (std::size_t k = 0; k < run.levels.size(); ++k) {
            auto cells = level_cells(run.levels[k].level, run.levels[k].num_triangles, run.levels[k].h);
            for (std::size_t i = 0; i < 4; ++i) {
                cells.push_back(CsvTable::number(errs[i][k]));
            }
            for (std::size_t i = 0; i < 4; ++i) {
                cells.push_back(CsvTable::number(eocs[i][k]));
            }
            table.add_row(std::move(cells));
        }
        for (const char* n : names) {
            table.check_eoc(std::string("err_") + n, std::string("eoc_") + n);
        }
        table.write(config.out_dir / "errors.csv");
        return run;
    }

    std::vector<double> energies;
    for (const auto& l : run.levels) {
        energies.push_back(l.energy);
    }
    const bool with_errors = c.energy_error_reported && energies.size() >= 3;
    if (with_errors) {
        run.energy_errors = energy_error_nonlinear(energies);
        run.energy_eoc = eoc_sequence(run.energy_errors->error);
    }
    std::vector<std::string> cols{"level", "num_triangles", "h", "energy"};
    if (with_errors) {
        cols.insert(cols.end(), {"err", "eoc"});
    }
    CsvTable table(cols);
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
        auto cells = level_cells(run.levels[k].level, run.levels[k].num_triangles, run.levels[k].h);
        cells.push_back(CsvTable::number(energies[k]));
        if (with_errors) {
            cells.push_back(CsvTable::number(run.energy_errors->error[k]));
            cells.push_back(CsvTable::number(run.energy_eoc[k]));
        }
        table.add_row(std::move(cells));
    }
    if (with_errors) {
        table.check_eoc("err", "eoc");
    }
    table.write(config.out_dir / "energy.csv");
    return run;
}

} // namespace smectic
