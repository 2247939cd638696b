// Convergence tables for the decoupled triharmonic solver and the
// generalized Stokes solver.
//
//   ncfem --domain cube --levels 1,2,4,8 --format md
//   ncfem --config run.ini --mode stokes-only --out stokes.csv

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ncfem/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Nonconforming linear FEM for the generalized Stokes and triharmonic equations"};
    app.set_config("--config", "", "Flat key = value file; command-line flags override it");

    std::string domain = "cube";
    std::string mode = "triharmonic";
    std::string format = "csv";
    ncfem::RunConfig config;

    app.add_option("--domain", domain, "cube or lshape")
        ->check(CLI::IsMember({"cube", "lshape"}))
        ->capture_default_str();
    app.add_option("--levels", config.levels,
                   "Subdivisions n per unit length, h = 1/n (default: 1,2,4,8 on the cube, "
                   "2,4,8 on the L-shape)")
        ->delimiter(',');
    app.add_option("--mode", mode, "triharmonic or stokes-only")
        ->check(CLI::IsMember({"triharmonic", "stokes", "stokes-only"}))
        ->capture_default_str();
    app.add_option("--quad-err", config.quad_err, "Tet quadrature degree for error integrals")
        ->capture_default_str();
    app.add_option("--quad-load", config.quad_load, "Tet quadrature degree for load vectors")
        ->capture_default_str();
    app.add_option("--solver-tol", config.solver_tol, "Relative residual tolerance")
        ->capture_default_str();
    app.add_option("--identity-tol", config.identity_tol,
                   "Bound on |curl_h sigma_h + dev grad_h r_h| checked at every level")
        ->capture_default_str();
    app.add_option("--out", config.out, "Output file (default: stdout)");
    app.add_option("--format", format, "csv or md")
        ->check(CLI::IsMember({"csv", "md"}))
        ->capture_default_str();
    app.add_option("--export-vtk", config.export_vtk,
                   "Write <prefix>_n<level>.vtk with cellwise sigma_h, r_h, p_h");
    app.add_flag("--allow-heavy", config.allow_heavy,
                 "Permit levels above 8 (n = 16 needs several GB and a long run)");

    CLI11_PARSE(app, argc, argv);

    try {
        config.domain = ncfem::parse_domain(domain);
        config.mode = ncfem::parse_mode(mode);
        config.format = ncfem::parse_format(format);
        config.validate();

        const ncfem::ErrorReport report = ncfem::run_experiment(config);
        if (config.out.empty()) {
            ncfem::write_report(std::cout, report, config.format);
        }
        else {
            std::ofstream os(config.out);
            if (!os)
                throw ncfem::FemError("cannot open " + config.out);
            ncfem::write_report(os, report, config.format);
        }
    }
    catch (const std::exception& e) {
        std::cerr << "ncfem: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
