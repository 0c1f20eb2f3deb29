// Command-line driver for convergence studies.

#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "wgfem/study.hpp"

int
main(int argc, char** argv)
{
    using namespace wgfem;

    CLI::App app{"Weak Galerkin / conforming P1 convergence studies for -Laplace(u) = f"};
    app.set_config("--config", "", "Read options from a key = value file; command-line flags take precedence");

    StudyConfig cfg;
    std::string levels;
    std::string problem;

    const std::map<std::string, Method>       methods{{"wg", Method::wg}, {"conforming", Method::conforming}};
    const std::map<std::string, Family>       families{{"uniform", Family::uniform}, {"degenerate", Family::degenerate}};
    const std::map<std::string, SolverMethod> solvers{{"direct", SolverMethod::direct}, {"cg", SolverMethod::cg}};
    const std::map<std::string, OutputFormat> formats{{"table", OutputFormat::table}, {"csv", OutputFormat::csv}};

    app.add_option("--dim", cfg.dim, "Space dimension")->check(CLI::IsMember({2, 3}));
    app.add_option("--method", cfg.method, "wg | conforming")->transform(CLI::CheckedTransformer(methods));
    app.add_option("--family", cfg.family, "uniform | degenerate")->transform(CLI::CheckedTransformer(families));
    app.add_option("--degree", cfg.degree, "WG polynomial degree k (0, 1 or 2)");
    app.add_option("--levels", levels, "Level range A..B (mesh size 2^-level)");
    app.add_option("--problem", problem, "poly2d | poly3d | zero (default matches --dim)");
    app.add_option("--solver", cfg.solver.method, "direct | cg")->transform(CLI::CheckedTransformer(solvers));
    app.add_option("--tol", cfg.solver.tol, "Relative residual tolerance for cg");
    app.add_option("--format", cfg.format, "table | csv")->transform(CLI::CheckedTransformer(formats));
    app.add_option("--out", cfg.out, "Write the report to this file instead of stdout");
    app.add_option("--export-mesh", cfg.export_mesh, "Write the finest mesh with solution fields as legacy VTK");
    app.add_option("--export-system", cfg.export_system,
                   "Write the finest assembled system as MatrixMarket files <prefix>_A.mtx and <prefix>_b.mtx");
    app.add_option("--max-cells", cfg.max_cells, "Refuse to build meshes larger than this");
    app.add_option("--max-dofs", cfg.max_dofs, "Stop the study at the first level with more unknowns");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (levels.empty())
            levels = (cfg.dim == 3 && cfg.family == Family::degenerate) ? "2..4" : "3..5";
        std::tie(cfg.level_min, cfg.level_max) = parse_level_range(levels);
        cfg.problem = problem.empty() ? (cfg.dim == 2 ? "poly2d" : "poly3d") : problem;
        cfg.validate();
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    ConvergenceReport report;
    try
    {
        report = run_study(cfg);
        if (cfg.out.empty())
            std::cout << render(report, cfg.format);
        else
            write_report(report, cfg.format, cfg.out);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (report.failed)
    {
        std::cerr << "error: " << report.failure << '\n';
        return 1;
    }
    return 0;
}
