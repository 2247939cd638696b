#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "ncfem/experiment.hpp"

namespace ncfem {
namespace {

TEST(Parsing, NamesRoundTrip)
{
    EXPECT_EQ(parse_domain("cube"), Domain::Cube);
    EXPECT_EQ(parse_domain("lshape"), Domain::LShape);
    EXPECT_EQ(parse_mode("triharmonic"), Mode::Triharmonic);
    EXPECT_EQ(parse_mode("stokes-only"), Mode::StokesOnly);
    EXPECT_EQ(parse_mode("stokes"), Mode::StokesOnly);
    EXPECT_EQ(parse_format("csv"), OutputFormat::Csv);
    EXPECT_EQ(parse_format("md"), OutputFormat::Markdown);
    EXPECT_EQ(parse_domain(to_string(Domain::LShape)), Domain::LShape);
    EXPECT_EQ(parse_mode(to_string(Mode::StokesOnly)), Mode::StokesOnly);
    EXPECT_THROW(parse_domain("sphere"), FemError);
    EXPECT_THROW(parse_mode("poisson"), FemError);
    EXPECT_THROW(parse_format("xml"), FemError);
}

TEST(RunConfig, DefaultsAndValidation)
{
    RunConfig c;
    EXPECT_EQ(c.resolved_levels(), (std::vector<int>{1, 2, 4, 8}));
    c.domain = Domain::LShape;
    EXPECT_EQ(c.resolved_levels(), (std::vector<int>{2, 4, 8}));
    EXPECT_NO_THROW(c.validate());

    RunConfig bad;
    bad.levels = {4, 2};
    EXPECT_THROW(bad.validate(), FemError);
    bad.levels = {0, 2};
    EXPECT_THROW(bad.validate(), FemError);
    bad.levels = {2, 16};
    EXPECT_THROW(bad.validate(), FemError);
    bad.allow_heavy = true;
    EXPECT_NO_THROW(bad.validate());

    RunConfig tol;
    tol.solver_tol = 0.0;
    EXPECT_THROW(tol.validate(), FemError);
    tol.solver_tol = 1e-10;
    tol.identity_tol = -1.0;
    EXPECT_THROW(tol.validate(), FemError);
    tol.identity_tol = 1e-8;
    tol.quad_err = 99;
    EXPECT_THROW(tol.validate(), FemError);
}

TEST(DomainMesh, Builders)
{
    EXPECT_EQ(build_domain_mesh(Domain::Cube, 2).num_tets(), 48);
    EXPECT_NEAR(build_domain_mesh(Domain::LShape, 2).total_volume(), 3.0, 1e-13);
    EXPECT_DOUBLE_EQ(build_domain_mesh(Domain::Cube, 4).mesh_size(), 0.25);
}

TEST(Triharmonic, ZeroForcingGivesZeroSolution)
{
    const Mesh mesh = build_cube_mesh(2);
    const TriharmonicSolution s = solve_triharmonic(mesh, [](const Vec3&) { return 0.0; });
    EXPECT_EQ(s.w.norm(), 0.0);
    EXPECT_EQ(s.sigma.norm(), 0.0);
    EXPECT_EQ(s.r.norm(), 0.0);
    EXPECT_EQ(s.p.norm(), 0.0);
    EXPECT_EQ(s.u.norm(), 0.0);
}

TEST(Triharmonic, SolutionSatisfiesIdentity)
{
    const Mesh mesh = build_cube_mesh(2);
    const SineCubed u;
    const TriharmonicSolution s =
        solve_triharmonic(mesh, [&](const Vec3& x) { return u.forcing(x); });
    EXPECT_GT(s.u.norm(), 0.0);
    EXPECT_LE(identity_residual(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r), 1e-8);
}

TEST(Stokes, ConstantLoadOnCube)
{
    const Mesh mesh = build_cube_mesh(2);
    std::vector<Sym3> g(mesh.num_tets(), Sym3::from_matrix(Mat3::Identity()));
    const StokesSolution s = solve_generalized_stokes(mesh, g);
    EXPECT_GT(s.sigma.norm(), 0.0);
    EXPECT_LE(identity_residual(mesh, s.cr_sym, s.sigma, s.cr_vector, s.r), 1e-8);
}

std::string csv_of(const RunConfig& c, const SineCubed& u = SineCubed())
{
    std::ostringstream os;
    write_report(os, run_experiment(c, u), OutputFormat::Csv);
    return os.str();
}

TEST(Experiment, CsvHeaderAndDeterminism)
{
    RunConfig c;
    c.levels = {1, 2};
    const std::string a = csv_of(c);
    EXPECT_EQ(a.substr(0, a.find('\n')),
              "level,h,err_sigma_l2,rate,err_sigma_h1,rate,err_u_h1,rate,err_u_h2,rate,"
              "jump_r,identity_residual");
    EXPECT_EQ(a, csv_of(c));
    // Header plus one row per level.
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
}

TEST(Experiment, StokesOnlyHeader)
{
    RunConfig c;
    c.levels = {1, 2};
    c.mode = Mode::StokesOnly;
    const std::string a = csv_of(c);
    EXPECT_EQ(a.substr(0, a.find('\n')),
              "level,h,err_sigma_l2,rate,err_sigma_h1,rate,err_p_l2,rate,jump_r,rate,"
              "identity_residual");
}

TEST(Experiment, ZeroAmplitudeGivesZeroErrors)
{
    RunConfig c;
    c.levels = {1, 2};
    const ErrorReport r = run_experiment(c, SineCubed(0.0));
    for (const ErrorColumn& col : r.columns)
        for (double v : col.values)
            EXPECT_EQ(v, 0.0) << col.key;
    EXPECT_FALSE(r.last_rate("err_sigma_l2"));
}

TEST(Experiment, MarkdownOutput)
{
    RunConfig c;
    c.levels = {1, 2};
    std::ostringstream os;
    write_report(os, run_experiment(c), OutputFormat::Markdown);
    EXPECT_NE(os.str().find("2^-1"), std::string::npos);
    EXPECT_NE(os.str().find("| h "), std::string::npos);
}

}  // namespace
}  // namespace ncfem
