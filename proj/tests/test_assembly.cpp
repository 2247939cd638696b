#include <gtest/gtest.h>

#include <random>

#include "ncfem/assembly.hpp"
#include "ncfem/errors.hpp"
#include "support.hpp"

namespace ncfem {
namespace {

double max_abs(const SparseMatrix& a)
{
    double m = 0.0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

bool identical(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.nonZeros() != b.nonZeros() || a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (int k = 0; k < a.nonZeros(); ++k)
        if (a.valuePtr()[k] != b.valuePtr()[k] || a.innerIndexPtr()[k] != b.innerIndexPtr()[k])
            return false;
    return true;
}

TEST(Biharmonic, SymmetricPositiveDefinite)
{
    const Mesh mesh = build_cube_mesh(2);
    const DofMap map = build_dofmap(mesh, Space::Mwx);
    const auto bases = mwx_local_bases(mesh);
    const SparseMatrix k = assemble_biharmonic(mesh, map, bases);
    EXPECT_EQ(max_abs(k - SparseMatrix(k.transpose())), 0.0);
    for (int i = 0; i < k.rows(); ++i)
        EXPECT_GT(k.coeff(i, i), 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(k)};
    EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-8 * eig.eigenvalues().maxCoeff());
    EXPECT_TRUE(identical(k, assemble_biharmonic(mesh, map, bases)));
}

TEST(Biharmonic, ActsOnQuadraticInterpolant)
{
    const Mesh mesh = build_cube_mesh(2);
    const DofMap map = build_dofmap(mesh, Space::Mwx, BoundaryPolicy::Free);
    const auto bases = mwx_local_bases(mesh);
    std::mt19937 rng(8);
    const testing::Poly q = testing::random_poly(rng, 2);
    const Eigen::VectorXd c = interpolate_mwx(
        mesh, map, [&](const Vec3& x) { return q(x); }, [&](const Vec3& x) { return q.gradient(x); });
    const Eigen::VectorXd kc = assemble_biharmonic(mesh, map, bases) * c;

    // (∇²q, ∇²ψ_b) with the Hessian of q from the oracle.
    const Mat3 hq = q.hessian(Vec3::Zero());
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(map.size());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const std::vector<int> dofs = local_dofs(mesh, map, t);
        for (int b = 0; b < MwxLocalBasis::kSize; ++b)
            expected[dofs[b]] += mesh.tet(t).volume * ddot(hq, bases[t].hessian(b));
    }
    EXPECT_LE((kc - expected).cwiseAbs().maxCoeff(), 1e-10 * (1.0 + expected.norm()));
}

TEST(ScalarLoad, ZeroAndUnitForcing)
{
    const Mesh mesh = testing::reference_tet_mesh();
    const DofMap map = build_dofmap(mesh, Space::Mwx, BoundaryPolicy::Free);
    const auto bases = mwx_local_bases(mesh);
    EXPECT_EQ(assemble_load_scalar(mesh, map, bases, [](const Vec3&) { return 0.0; }).norm(), 0.0);

    // Σ_b (1, ψ_b) DoF_b(1) = ∫_T 1.
    const Eigen::VectorXd load =
        assemble_load_scalar(mesh, map, bases, [](const Vec3&) { return 1.0; });
    const Eigen::VectorXd one = interpolate_mwx(
        mesh, map, [](const Vec3&) { return 1.0; }, [](const Vec3&) { return Vec3::Zero().eval(); });
    EXPECT_NEAR(load.dot(one), 1.0 / 6.0, 1e-14);
    EXPECT_THROW(assemble_load_scalar(mesh, map, bases, [](const Vec3&) { return 1.0; }, 9),
                 FemError);
}

TEST(ScalarLoad, Deterministic)
{
    const Mesh mesh = build_cube_mesh(1);
    const DofMap map = build_dofmap(mesh, Space::Mwx);
    const auto bases = mwx_local_bases(mesh);
    auto f = [](const Vec3& x) { return std::sin(3 * x[0]) * std::exp(x[1] - x[2]); };
    const Eigen::VectorXd a = assemble_load_scalar(mesh, map, bases, f);
    const Eigen::VectorXd b = assemble_load_scalar(mesh, map, bases, f);
    EXPECT_TRUE(a.allFinite());
    EXPECT_EQ((a - b).norm(), 0.0);
}

struct StokesFixture : ::testing::Test {
    Mesh mesh = build_cube_mesh(2);
    DofMap cr_sym = build_dofmap(mesh, Space::CrSym);
    DofMap cr_vector = build_dofmap(mesh, Space::CrVector);
    DofMap p0 = build_dofmap(mesh, Space::P0Traceless);
};

TEST_F(StokesFixture, BlocksAreSymmetricAndDeterministic)
{
    const std::vector<Sym3> g(mesh.num_tets());
    const StokesSystem a = assemble_stokes(mesh, cr_sym, cr_vector, p0, g);
    const StokesSystem b = assemble_stokes(mesh, cr_sym, cr_vector, p0, g);
    EXPECT_LE(max_abs(a.saddle.primal - SparseMatrix(a.saddle.primal.transpose())),
              1e-14 * max_abs(a.saddle.primal));
    EXPECT_TRUE(identical(a.saddle.primal, b.saddle.primal));
    EXPECT_TRUE(identical(a.saddle.constraint, b.saddle.constraint));
    EXPECT_EQ(a.num_sigma, cr_sym.size());
    EXPECT_EQ(a.num_r, cr_vector.size());
    EXPECT_EQ(a.num_p, p0.size());
    EXPECT_EQ(a.saddle.rhs_primal.norm(), 0.0);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(a.stiffness)};
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ej{Eigen::MatrixXd(a.penalty)};
    EXPECT_GT(ej.eigenvalues().minCoeff(), -1e-12 * ej.eigenvalues().maxCoeff());
}

TEST_F(StokesFixture, PenaltyOnConstantsSeesOnlyBoundary)
{
    const SparseMatrix j = assemble_jump_penalty(mesh, cr_vector);
    const Vec3 c(0.3, -1.0, 2.0);
    const Eigen::VectorXd r = interpolate_cr_vector(mesh, cr_vector, [&](const Vec3&) { return c; });
    double expected = 0.0;
    for (const Face& f : mesh.faces())
        if (f.boundary())
            expected += f.area / f.diameter * c.squaredNorm();
    EXPECT_NEAR(r.dot(j * r), expected, 1e-12 * expected);
}

TEST_F(StokesFixture, DevGradAnnihilatesRtFields)
{
    const SparseMatrix bs = assemble_devgrad_block(mesh, cr_vector, p0);
    const Vec3 b(1.0, -2.0, 0.5);
    const Eigen::VectorXd r = interpolate_cr_vector(
        mesh, cr_vector, [&](const Vec3& x) -> Vec3 { return 1.7 * x + b; });
    EXPECT_LE((bs * r).cwiseAbs().maxCoeff(), 1e-13);

    // (x2, 0, 0) is not in RT.
    const Eigen::VectorXd s = interpolate_cr_vector(
        mesh, cr_vector, [](const Vec3& x) -> Vec3 { return {x[1], 0.0, 0.0}; });
    EXPECT_GT((bs * s).norm(), 1e-3);
}

TEST_F(StokesFixture, CurlAnnihilatesHessianInterpolant)
{
    const DofMap free_sym = build_dofmap(mesh, Space::CrSym, BoundaryPolicy::Free);
    const SparseMatrix bc = assemble_curl_block(mesh, free_sym, p0);
    const testing::Poly u = testing::Poly::monomial(1.0, {1, 1, 1});
    const Eigen::VectorXd s =
        interpolate_cr_sym(mesh, free_sym, [&](const Vec3& x) { return u.hessian(x); });
    EXPECT_LE((bc * s).cwiseAbs().maxCoeff(), 1e-11);
}

TEST_F(StokesFixture, CurlAndDevGradBlocksMatchPointwiseOperators)
{
    // Per tet, B applied to a field equals |T| times the traceless
    // coordinates of curl_h σ + dev grad_h r.
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd sigma(cr_sym.size()), r(cr_vector.size());
    for (auto& v : sigma)
        v = u(rng);
    for (auto& v : r)
        v = u(rng);
    const Eigen::VectorXd q = assemble_curl_block(mesh, cr_sym, p0) * sigma +
                              assemble_devgrad_block(mesh, cr_vector, p0) * r;
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        Eigen::VectorXd qt(8);
        for (int m = 0; m < 8; ++m)
            qt[m] = q[p0.index(t, m)];
        sum += qt.squaredNorm() / mesh.tet(t).volume;
    }
    EXPECT_NEAR(std::sqrt(sum), identity_residual(mesh, cr_sym, sigma, cr_vector, r),
                1e-12 * std::sqrt(sum));
}

TEST_F(StokesFixture, HessianAndSigmaLoadsAreAdjoint)
{
    const Mesh small = build_cube_mesh(1);
    const DofMap mwx = build_dofmap(small, Space::Mwx);
    const DofMap sym = build_dofmap(small, Space::CrSym, BoundaryPolicy::Free);
    const auto bases = mwx_local_bases(small);
    Eigen::MatrixXd l1(sym.size(), mwx.size()), l2(mwx.size(), sym.size());
    for (int j = 0; j < mwx.size(); ++j)
        l1.col(j) = assemble_hessian_load(small, mwx, bases, Eigen::VectorXd::Unit(mwx.size(), j), sym);
    for (int j = 0; j < sym.size(); ++j)
        l2.col(j) = assemble_sigma_load(small, sym, Eigen::VectorXd::Unit(sym.size(), j), mwx, bases);
    EXPECT_LE((l1 - l2.transpose()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_GT(l1.norm(), 0.0);
}

TEST(SymLoad, SingleTetHandComputation)
{
    const Mesh mesh = testing::reference_tet_mesh();
    const DofMap map = build_dofmap(mesh, Space::CrSym, BoundaryPolicy::Free);
    const std::vector<Sym3> g{sym(Mat3::Identity())};
    const Eigen::VectorXd load = assemble_sym_load(mesh, map, g);
    // |T| (I : E_c) mean(φ_i), mean(φ_i) = 1/4.
    for (int f = 0; f < 4; ++f)
        for (int c = 0; c < 6; ++c)
            EXPECT_NEAR(load[map.index(f, c)], (c < 3 ? 1.0 : 0.0) / 24.0, 1e-15);
}

TEST(HessianLoad, AffineFieldGivesZero)
{
    const Mesh mesh = build_cube_mesh(2);
    const DofMap mwx = build_dofmap(mesh, Space::Mwx, BoundaryPolicy::Free);
    const DofMap sym = build_dofmap(mesh, Space::CrSym);
    const auto bases = mwx_local_bases(mesh);
    const Eigen::VectorXd w = interpolate_mwx(
        mesh, mwx, [](const Vec3& x) { return 1.0 + 2.0 * x[0] - x[2]; },
        [](const Vec3&) { return Vec3(2.0, 0.0, -1.0); });
    EXPECT_LE(assemble_hessian_load(mesh, mwx, bases, w, sym).norm(), 1e-11);
}

TEST(StokesAssembly, RejectsForeignDofMaps)
{
    const Mesh a = build_cube_mesh(1);
    const Mesh b = build_cube_mesh(2);
    const std::vector<Sym3> g(b.num_tets());
    EXPECT_THROW(assemble_stokes(b, build_dofmap(a, Space::CrSym), build_dofmap(b, Space::CrVector),
                                 build_dofmap(b, Space::P0Traceless), g),
                 FemError);
}

TEST(Helmholtz, ConstraintHasFullRankOnOneCube)
{
    const Mesh mesh = build_cube_mesh(1);
    const StokesSystem s = assemble_stokes(
        mesh, build_dofmap(mesh, Space::CrSym), build_dofmap(mesh, Space::CrVector),
        build_dofmap(mesh, Space::P0Traceless), std::vector<Sym3>(mesh.num_tets()));
    const Eigen::MatrixXd b(s.saddle.constraint);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        rank += sv[i] > 1e-9 * sv[0];
    EXPECT_EQ(rank, 8 * mesh.num_tets());
}

}  // namespace
}  // namespace ncfem
