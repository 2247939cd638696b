#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ncfem/assembly.hpp"
#include "ncfem/linsolve.hpp"

namespace ncfem {
namespace {

SparseMatrix dense_to_sparse(const Eigen::MatrixXd& d)
{
    std::vector<Triplet> t;
    for (int j = 0; j < d.cols(); ++j)
        for (int i = 0; i < d.rows(); ++i)
            if (d(i, j) != 0.0)
                t.emplace_back(i, j, d(i, j));
    return compress(t, static_cast<int>(d.rows()), static_cast<int>(d.cols()));
}

TEST(Compress, SumsDuplicatesInOrder)
{
    std::vector<Triplet> t{{1, 0, 1.0}, {0, 0, 2.0}, {1, 0, 0.5}, {0, 1, -1.0}, {1, 1, 3.0}};
    const SparseMatrix a = compress(t, 2, 2);
    EXPECT_EQ(a.nonZeros(), 4);
    EXPECT_EQ(a.coeff(1, 0), 1.5);
    EXPECT_EQ(a.coeff(0, 0), 2.0);
    EXPECT_EQ(a.coeff(0, 1), -1.0);
    EXPECT_EQ(a.coeff(1, 1), 3.0);
    EXPECT_THROW(compress({{2, 0, 1.0}}, 2, 2), FemError);
    EXPECT_EQ(compress({}, 3, 3).nonZeros(), 0);
}

TEST(Compress, IsDeterministicUnderDuplicates)
{
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> idx(0, 9);
    std::uniform_real_distribution<double> val(-1, 1);
    std::vector<Triplet> t;
    for (int k = 0; k < 500; ++k)
        t.emplace_back(idx(rng), idx(rng), val(rng));
    const SparseMatrix a = compress(t, 10, 10);
    const SparseMatrix b = compress(t, 10, 10);
    ASSERT_EQ(a.nonZeros(), b.nonZeros());
    for (int k = 0; k < a.nonZeros(); ++k)
        EXPECT_EQ(a.valuePtr()[k], b.valuePtr()[k]);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(10, 10);
    for (const Triplet& e : t)
        d(e.row(), e.col()) += e.value();
    EXPECT_LE((Eigen::MatrixXd(a) - d).norm(), 1e-13);
}

TEST(SolveSpd, SmallExamples)
{
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
    SparseMatrix id(5, 5);
    id.setIdentity();
    EXPECT_LE((solve_spd(id, b) - b).norm(), 1e-15);

    const SparseMatrix a = dense_to_sparse((Eigen::Matrix2d() << 2, 1, 1, 2).finished());
    const Eigen::VectorXd x = solve_spd(a, Eigen::Vector2d(3, 3));
    EXPECT_NEAR(x[0], 1.0, 1e-14);
    EXPECT_NEAR(x[1], 1.0, 1e-14);
}

TEST(SolveSpd, RandomAgainstDense)
{
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(50, 50);
    for (auto& v : m.reshaped())
        v = g(rng);
    const Eigen::MatrixXd spd = m * m.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
    Eigen::VectorXd b(50);
    for (auto& v : b)
        v = g(rng);
    const SparseMatrix a = dense_to_sparse(spd);
    const Eigen::VectorXd x = solve_spd(a, b);
    EXPECT_LE(relative_residual(a, x, b), 1e-10);
    EXPECT_LE((x - spd.llt().solve(b)).norm(), 1e-10 * x.norm());

    const SpdSolver solver(a);
    EXPECT_TRUE(solver.direct());
    EXPECT_EQ(solver.solve(Eigen::VectorXd::Zero(50)).norm(), 0.0);
    EXPECT_THROW(solver.solve(Eigen::VectorXd::Zero(3)), FemError);
}

TEST(SolveSpd, NonSquareRejected)
{
    SparseMatrix a(3, 2);
    EXPECT_THROW(SpdSolver{a}, FemError);
}

// Small Stokes system on one cube with random data.
StokesSystem small_stokes(int n, unsigned seed)
{
    const Mesh mesh = build_cube_mesh(n);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Sym3> g(mesh.num_tets());
    for (Sym3& s : g)
        for (auto& v : s.coeffs)
            v = u(rng);
    return assemble_stokes(mesh, build_dofmap(mesh, Space::CrSym),
                           build_dofmap(mesh, Space::CrVector),
                           build_dofmap(mesh, Space::P0Traceless), g);
}

TEST(SolveSaddle, MethodsAgree)
{
    const StokesSystem sys = small_stokes(2, 1);
    SaddleOptions lu;
    lu.method = SaddleMethod::SparseLU;
    const SaddleSolution a = solve_saddle(sys.saddle, lu);
    const SaddleSolution b = solve_saddle(sys.saddle);
    SaddleOptions mr;
    mr.method = SaddleMethod::Minres;
    const SaddleSolution c = solve_saddle(sys.saddle, mr);
    EXPECT_LE(a.residual, 1e-10);
    EXPECT_LE(b.residual, 1e-10);
    EXPECT_LE(c.residual, 1e-10);
    EXPECT_LE((a.primal - b.primal).norm(), 1e-8 * a.primal.norm());
    EXPECT_LE((a.multiplier - b.multiplier).norm(), 1e-8 * a.multiplier.norm());
    EXPECT_LE((c.primal - b.primal).norm(), 1e-8 * a.primal.norm());
    EXPECT_LE((c.multiplier - b.multiplier).norm(), 1e-8 * a.multiplier.norm());
}

TEST(SolveSaddle, ZeroRightHandSide)
{
    StokesSystem sys = small_stokes(1, 2);
    sys.saddle.rhs_primal.setZero();
    const SaddleSolution s = solve_saddle(sys.saddle);
    EXPECT_EQ(s.primal.norm(), 0.0);
    EXPECT_EQ(s.multiplier.norm(), 0.0);
}

TEST(SolveSaddle, ConstraintOnlyData)
{
    // Right-hand side B x* in the multiplier block only.
    StokesSystem sys = small_stokes(2, 3);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd xs(sys.saddle.num_primal());
    for (auto& v : xs)
        v = u(rng);
    sys.saddle.rhs_primal.setZero();
    sys.saddle.rhs_constraint = sys.saddle.constraint * xs;
    const SaddleSolution s = solve_saddle(sys.saddle);
    const Eigen::VectorXd bx = sys.saddle.constraint * s.primal - sys.saddle.rhs_constraint;
    EXPECT_LE(bx.norm(), 1e-10 * sys.saddle.rhs_constraint.norm());
}

TEST(SolveSaddle, BitReproducible)
{
    const StokesSystem sys = small_stokes(1, 5);
    const SaddleSolution a = solve_saddle(sys.saddle);
    const SaddleSolution b = solve_saddle(sys.saddle);
    EXPECT_EQ((a.primal - b.primal).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.multiplier - b.multiplier).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveSaddle, AutoSwitchesToIterativeAboveLimit)
{
    const StokesSystem sys = small_stokes(1, 6);
    SaddleOptions o;
    o.direct_limit = 10;
    const SaddleSolution s = solve_saddle(sys.saddle, o);
    EXPECT_LE(s.residual, o.iterative_tol);
    EXPECT_GT(s.iterations, 20);
}

TEST(SolveSaddle, ShapeMismatch)
{
    StokesSystem sys = small_stokes(1, 7);
    sys.saddle.weights.resize(3);
    EXPECT_THROW(solve_saddle(sys.saddle), FemError);
}

TEST(MatrixMarket, Header)
{
    std::ostringstream os;
    write_matrix_market(os, dense_to_sparse((Eigen::Matrix2d() << 2, 0, 1, 2).finished()));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
              "%%MatrixMarket matrix coordinate real general");
    EXPECT_NE(os.str().find("2 2 3"), std::string::npos);
    EXPECT_NE(os.str().find("2 1 1"), std::string::npos);
}

}  // namespace
}  // namespace ncfem
