#include "smectic/error.hpp"
#include "smectic/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using smectic::CsvTable;

struct Options {
    smectic::RunConfig run;
    std::optional<double> q, B, K, m;
    std::string out = "out";
    bool no_fields = false;
};

void add_common(CLI::App& cmd, Options& o, bool nonlinear)
{
    cmd.add_option("--case", o.run.case_name, "case name")->required();
    cmd.add_option("--levels", o.run.levels, "number of meshes, starting from the 4-element mesh")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--q", o.q, "wave number override");
    cmd.add_option("--B", o.B, "B override");
    cmd.add_option("--K", o.K, "K override");
    cmd.add_option("--m", o.m, "m override");
    cmd.add_option("--quad-degree", o.run.disc.quad_degree, "triangle quadrature degree");
    cmd.add_option("--edge-points", o.run.disc.edge_points, "Gauss points per edge");
    cmd.add_option("--solver-tol", o.run.disc.solver_tol, "relative residual bound for linear solves");
    cmd.add_option("--out", o.out, "output directory");
    cmd.add_flag("--zero-load", o.run.overrides.zero_load, "replace the load by f = 0");
    cmd.add_flag("--no-fields", o.no_fields, "skip VTK output");
    if (nonlinear) {
        cmd.add_option("--alpha", o.run.uzawa.alpha, "angle damping");
        cmd.add_option("--tol-M", o.run.uzawa.tol_M, "tensor defect tolerance");
        cmd.add_option("--tol-phi", o.run.uzawa.tol_phi, "angle increment tolerance");
        cmd.add_option("--max-outer", o.run.uzawa.max_outer, "outer iteration cap");
        cmd.add_option("--max-inner", o.run.uzawa.max_inner, "inner iteration cap");
    }
}

void finalize(Options& o)
{
    o.run.overrides.q = o.q;
    o.run.overrides.B = o.B;
    o.run.overrides.K = o.K;
    o.run.overrides.m = o.m;
    o.run.out_dir = o.out;
    o.run.write_fields = !o.no_fields;
    o.run.validate();
}

std::string command_line(int argc, char** argv)
{
    std::ostringstream s;
    for (int i = 0; i < argc; ++i) {
        s << (i ? " " : "") << argv[i];
    }
    return s.str();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

std::string fmt(const std::optional<double>& v)
{
    if (!v) {
        return "     -";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%6.3f", *v);
    return buf;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite element solver for a tensor-valued smectic-A model"};
    app.require_subcommand(1);

    Options lin, field, nonlin;
    bool list = false;
    auto* cases = app.add_subcommand("cases", "list the available cases");
    cases->callback([&] { list = true; });
    auto* c_lin = app.add_subcommand("linear-convergence", "errors and EOCs for a linear case with exact solution");
    add_common(*c_lin, lin, false);
    auto* c_field = app.add_subcommand("linear-field", "norm sequence and Aitken-based errors for a linear case");
    add_common(*c_field, field, false);
    auto* c_nonlin = app.add_subcommand("nonlinear", "Uzawa iteration for a coupled tensor/angle case");
    add_common(*c_nonlin, nonlin, true);

    CLI11_PARSE(app, argc, argv);
    const std::string command = command_line(argc, argv);

    try {
        if (list) {
            for (const auto& n : smectic::case_names()) {
                std::cout << n << '\n';
            }
            return 0;
        }
        if (c_lin->parsed()) {
            finalize(lin);
            const auto c = smectic::case_by_name(lin.run.case_name, lin.run.overrides);
            const auto levels = smectic::run_linear_convergence(lin.run);
            smectic::write_manifest(lin.run, c, command);
            std::vector<double> e1, e2, e3;
            for (const auto& l : levels) {
                e1.push_back(l.errors.err_L2);
                e2.push_back(l.errors.err_divdiv);
                e3.push_back(l.errors.err_u);
            }
            const auto o1 = smectic::eoc_sequence(e1);
            const auto o2 = smectic::eoc_sequence(e2);
            const auto o3 = smectic::eoc_sequence(e3);
            std::cout << "level      #T      err_L2  eoc   err_divdiv  eoc       err_u  eoc\n";
            for (std::size_t k = 0; k < levels.size(); ++k) {
                std::printf("%5d %7d  %s %s  %s %s  %s %s\n", levels[k].level, levels[k].num_triangles,
                            fmt(e1[k]).c_str(), fmt(o1[k]).c_str(), fmt(e2[k]).c_str(), fmt(o2[k]).c_str(),
                            fmt(e3[k]).c_str(), fmt(o3[k]).c_str());
            }
        } else if (c_field->parsed()) {
            finalize(field);
            const auto c = smectic::case_by_name(field.run.case_name, field.run.overrides);
            const auto run = smectic::run_linear_field(field.run);
            smectic::write_manifest(field.run, c, command);
            std::cout << "level      #T   norm_divdiv         err     eoc\n";
            for (std::size_t k = 0; k < run.levels.size(); ++k) {
                std::printf("%5d %7d  %s  %s  %s\n", run.levels[k].level, run.levels[k].num_triangles,
                            fmt(run.levels[k].norm_divdiv).c_str(), fmt(run.errors.error[k]).c_str(),
                            fmt(run.eoc[k]).c_str());
            }
        } else if (c_nonlin->parsed()) {
            finalize(nonlin);
            const auto c = smectic::case_by_name(nonlin.run.case_name, nonlin.run.overrides);
            const auto run = smectic::run_nonlinear(nonlin.run);
            smectic::write_manifest(nonlin.run, c, command);
            std::cout << "level      #T  outer  inner_mean   res_M_final       energy  status\n";
            for (const auto& l : run.levels) {
                std::printf("%5d %7d  %5d  %10.2f   %s  %s  %s\n", l.level, l.num_triangles, l.log.num_outer(),
                            l.log.inner_mean(), fmt(l.log.final_res_M()).c_str(), fmt(l.energy).c_str(),
                            smectic::to_string(l.log.status).c_str());
            }
        }
        return 0;
    } catch (const smectic::ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
