#include "ncfem/experiment.hpp"

#include <algorithm>
#include <fstream>

#include "ncfem/assembly.hpp"
#include "ncfem/quadrature.hpp"

namespace ncfem {

Domain parse_domain(const std::string& s)
{
    if (s == "cube")
        return Domain::Cube;
    if (s == "lshape")
        return Domain::LShape;
    throw FemError("unknown domain '" + s + "' (expected cube or lshape)");
}

Mode parse_mode(const std::string& s)
{
    if (s == "triharmonic")
        return Mode::Triharmonic;
    if (s == "stokes" || s == "stokes-only")
        return Mode::StokesOnly;
    throw FemError("unknown mode '" + s + "' (expected triharmonic or stokes-only)");
}

OutputFormat parse_format(const std::string& s)
{
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "md" || s == "markdown")
        return OutputFormat::Markdown;
    throw FemError("unknown format '" + s + "' (expected csv or md)");
}

std::string to_string(Domain d) { return d == Domain::Cube ? "cube" : "lshape"; }
std::string to_string(Mode m) { return m == Mode::Triharmonic ? "triharmonic" : "stokes-only"; }

std::vector<int> default_levels(Domain d)
{
    if (d == Domain::Cube)
        return {1, 2, 4, 8};
    return {2, 4, 8};
}

std::vector<int> RunConfig::resolved_levels() const
{
    return levels.empty() ? default_levels(domain) : levels;
}

void RunConfig::validate() const
{
    const std::vector<int> lv = resolved_levels();
    for (std::size_t k = 0; k < lv.size(); ++k) {
        if (lv[k] < 1)
            throw FemError("levels must be positive");
        if (k > 0 && lv[k] <= lv[k - 1])
            throw FemError("levels must be strictly increasing");
        if (lv[k] > kMaxDefaultLevel && !allow_heavy)
            throw FemError("level " + std::to_string(lv[k]) +
                           " is above " + std::to_string(kMaxDefaultLevel) +
                           "; set allow_heavy (--allow-heavy) to run it");
    }
    if (!(solver_tol > 0.0) || !(identity_tol > 0.0))
        throw FemError("tolerances must be positive");
    if (quad_err < 0 || quad_err > kMaxQuadratureDegree || quad_load < 0 ||
        quad_load > kMaxQuadratureDegree)
        throw FemError("quadrature degrees must lie in 0.." +
                       std::to_string(kMaxQuadratureDegree));
}

Mesh build_domain_mesh(Domain d, int n)
{
    return d == Domain::Cube ? build_cube_mesh(n) : build_lshape_mesh(n);
}

StokesSolution solve_generalized_stokes(const Mesh& mesh, std::span<const Sym3> g_h,
                                        double solver_tol)
{
    StokesSolution s{build_dofmap(mesh, Space::CrSym), build_dofmap(mesh, Space::CrVector),
                     build_dofmap(mesh, Space::P0Traceless)};
    const StokesSystem sys = assemble_stokes(mesh, s.cr_sym, s.cr_vector, s.p0, g_h);
    SaddleOptions opts;
    opts.tol = solver_tol;
    const SaddleSolution sol = solve_saddle(sys.saddle, opts);
    s.sigma = sol.primal.head(sys.num_sigma);
    s.r = sol.primal.tail(sys.num_r);
    s.p = sol.multiplier;
    s.iterations = sol.iterations;
    return s;
}

TriharmonicSolution solve_triharmonic(const Mesh& mesh, const ScalarFunction& f, int quad_load,
                                      double solver_tol)
{
    TriharmonicSolution s{build_dofmap(mesh, Space::Mwx), build_dofmap(mesh, Space::CrSym),
                          build_dofmap(mesh, Space::CrVector),
                          build_dofmap(mesh, Space::P0Traceless)};
    s.bases = mwx_local_bases(mesh);

    // The biharmonic matrix is factored once and reused for both MWX solves.
    const SpdSolver biharmonic(assemble_biharmonic(mesh, s.mwx, s.bases));
    s.w = biharmonic.solve(assemble_load_scalar(mesh, s.mwx, s.bases, f, quad_load), solver_tol);

    const std::vector<Mat3> hess = mwx_broken_hessian(mesh, s.mwx, s.bases, s.w);
    std::vector<Sym3> g(hess.size());
    for (std::size_t t = 0; t < hess.size(); ++t)
        g[t] = sym(hess[t]);
    const StokesSolution stokes = solve_generalized_stokes(mesh, g, solver_tol);
    s.sigma = stokes.sigma;
    s.r = stokes.r;
    s.p = stokes.p;
    s.stokes_iterations = stokes.iterations;

    s.u = biharmonic.solve(assemble_sigma_load(mesh, s.cr_sym, s.sigma, s.mwx, s.bases),
                           solver_tol);
    return s;
}

namespace {

std::vector<CellField> cell_fields(const Mesh& mesh, const DofMap& cr_sym,
                                   const Eigen::VectorXd& sigma, const DofMap& cr_vector,
                                   const Eigen::VectorXd& r, const DofMap& p0,
                                   const Eigen::VectorXd& p)
{
    CellField fs{"sigma", 9, {}}, fr{"r", 3, {}}, fp{"p", 9, {}};
    for (int t = 0; t < mesh.num_tets(); ++t) {
        Sym3 s;
        s.coeffs = 0.25 * cr_local_values(mesh, cr_sym, sigma, t).colwise().sum().transpose();
        const Mat3 sm = s.matrix();
        const Eigen::VectorXd rm = 0.25 * cr_local_values(mesh, cr_vector, r, t).colwise().sum();
        Tless3 q;
        for (int m = 0; m < 8; ++m)
            if (const int g = p0.index(t, m); g >= 0)
                q.coeffs[m] = p[g];
        const Mat3 pm = q.matrix();
        for (int i = 0; i < 3; ++i) {
            fr.values.push_back(rm[i]);
            for (int j = 0; j < 3; ++j) {
                fs.values.push_back(sm(i, j));
                fp.values.push_back(pm(i, j));
            }
        }
    }
    return {fs, fr, fp};
}

void check_identity(double residual, const RunConfig& config, int n)
{
    if (!(residual <= config.identity_tol))
        throw FemError("level n=" + std::to_string(n) +
                       ": curl_h sigma_h + dev grad_h r_h has norm " + std::to_string(residual) +
                       ", above " + std::to_string(config.identity_tol));
}

template <class Fn>
auto with_level(int n, Fn&& fn)
{
    try {
        return fn();
    }
    catch (const SolverError& e) {
        throw FemError("level n=" + std::to_string(n) + ": " + e.what());
    }
}

ErrorReport make_report(const RunConfig& config, const std::vector<ErrorColumn>& columns)
{
    ErrorReport report;
    report.title = to_string(config.domain) + ", " + to_string(config.mode);
    report.columns = columns;
    return report;
}

}  // namespace

ErrorReport run_triharmonic(const RunConfig& config, const SineCubed& exact)
{
    config.validate();
    ErrorReport report = make_report(
        config, {{"err_sigma_l2", "‖σ−σ_h‖", {}, true},
                 {"err_sigma_h1", "|σ−σ_h|_{1,h}", {}, true},
                 {"err_u_h1", "|u−u_h|_{1,h}", {}, true},
                 {"err_u_h2", "|u−u_h|_{2,h}", {}, true},
                 {"jump_r", "⦀r_h⦀_{1,h}", {}, false},
                 {"identity_residual", "‖curl_h σ_h + dev grad_h r_h‖", {}, false}});

    const auto f = [&](const Vec3& x) { return exact.forcing(x); };
    const auto hess = [&](const Vec3& x) { return exact.hessian(x); };
    const auto third = [&](const Vec3& x) { return exact.third(x); };
    const auto grad = [&](const Vec3& x) { return exact.gradient(x); };

    for (int n : config.resolved_levels()) {
        const Mesh mesh = build_domain_mesh(config.domain, n);
        const TriharmonicSolution s = with_level(
            n, [&] { return solve_triharmonic(mesh, f, config.quad_load, config.solver_tol); });
        const double id = identity_residual(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r);
        check_identity(id, config, n);

        report.levels.push_back(n);
        report.h.push_back(mesh.mesh_size());
        auto& c = report.columns;
        c[0].values.push_back(sym_error_l2(mesh, s.cr_sym, s.sigma, hess, config.quad_err));
        c[1].values.push_back(sym_error_h1(mesh, s.cr_sym, s.sigma, third, config.quad_err));
        c[2].values.push_back(mwx_error_h1(mesh, s.mwx, s.bases, s.u, grad, config.quad_err));
        c[3].values.push_back(mwx_error_h2(mesh, s.mwx, s.bases, s.u, hess, config.quad_err));
        c[4].values.push_back(triple_norm(mesh, s.cr_vector, s.r));
        c[5].values.push_back(id);

        if (!config.export_vtk.empty())
            write_vtk(config.export_vtk + "_n" + std::to_string(n) + ".vtk", mesh,
                      cell_fields(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r, s.p0, s.p));
    }
    return report;
}

ErrorReport run_stokes_only(const RunConfig& config, const SineCubed& exact)
{
    config.validate();
    ErrorReport report =
        make_report(config, {{"err_sigma_l2", "‖σ−σ_h‖", {}, true},
                             {"err_sigma_h1", "|σ−σ_h|_{1,h}", {}, true},
                             {"err_p_l2", "‖p_h‖", {}, true},
                             {"jump_r", "⦀r_h⦀_{1,h}", {}, true},
                             {"identity_residual", "‖curl_h σ_h + dev grad_h r_h‖", {}, false}});

    const auto hess = [&](const Vec3& x) { return exact.hessian(x); };
    const auto third = [&](const Vec3& x) { return exact.third(x); };
    const auto zero = [](const Vec3&) { return Mat3::Zero().eval(); };
    const TetRule& mean_rule = tet_rule(config.quad_load);

    for (int n : config.resolved_levels()) {
        const Mesh mesh = build_domain_mesh(config.domain, n);
        std::vector<Sym3> g(mesh.num_tets());
        for (int t = 0; t < mesh.num_tets(); ++t) {
            Mat3 mean = Mat3::Zero();
            for (std::size_t q = 0; q < mean_rule.size(); ++q)
                mean += 6.0 * mean_rule.weights[q] *
                        exact.stokes_load(mesh.point(t, mean_rule.points[q]));
            g[t] = sym(mean);
        }
        const StokesSolution s =
            with_level(n, [&] { return solve_generalized_stokes(mesh, g, config.solver_tol); });
        const double id = identity_residual(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r);
        check_identity(id, config, n);

        report.levels.push_back(n);
        report.h.push_back(mesh.mesh_size());
        auto& c = report.columns;
        c[0].values.push_back(sym_error_l2(mesh, s.cr_sym, s.sigma, hess, config.quad_err));
        c[1].values.push_back(sym_error_h1(mesh, s.cr_sym, s.sigma, third, config.quad_err));
        c[2].values.push_back(p0_error_l2(mesh, s.p0, s.p, zero, config.quad_err));
        c[3].values.push_back(triple_norm(mesh, s.cr_vector, s.r));
        c[4].values.push_back(id);

        if (!config.export_vtk.empty())
            write_vtk(config.export_vtk + "_n" + std::to_string(n) + ".vtk", mesh,
                      cell_fields(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r, s.p0, s.p));
    }
    return report;
}

ErrorReport run_experiment(const RunConfig& config, const SineCubed& exact)
{
    return config.mode == Mode::Triharmonic ? run_triharmonic(config, exact)
                                            : run_stokes_only(config, exact);
}

void write_report(std::ostream& os, const ErrorReport& report, OutputFormat format)
{
    if (format == OutputFormat::Csv)
        write_csv(os, report);
    else
        write_markdown(os, report);
}

}  // namespace ncfem
