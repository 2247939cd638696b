#include "ncfem/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/CholmodSupport>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace ncfem {

SparseMatrix compress(std::vector<Triplet> triplets, int rows, int cols)
{
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.col() != b.col() ? a.col() < b.col() : a.row() < b.row();
    });

    std::vector<int> outer(cols + 1, 0);
    std::vector<int> inner;
    std::vector<double> values;
    inner.reserve(triplets.size());
    values.reserve(triplets.size());
    int last_row = -1, last_col = -1;
    for (const Triplet& t : triplets) {
        if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
            throw FemError("triplet index out of range");
        if (t.row() == last_row && t.col() == last_col) {
            values.back() += t.value();
            continue;
        }
        inner.push_back(t.row());
        values.push_back(t.value());
        ++outer[t.col() + 1];
        last_row = t.row();
        last_col = t.col();
    }
    for (int c = 0; c < cols; ++c)
        outer[c + 1] += outer[c];

    const Eigen::Map<const SparseMatrix> view(rows, cols, static_cast<Eigen::Index>(values.size()),
                                              outer.data(), inner.data(), values.data());
    return SparseMatrix(view);
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b)
{
    const double r = (a * x - b).norm();
    const double nb = b.norm();
    return nb > 0 ? r / nb : r;
}

// SPD ----------------------------------------------------------------------------

struct SpdSolver::Impl {
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
};

SpdSolver::SpdSolver(SparseMatrix a)
    : a_(std::move(a))
    , impl_(std::make_unique<Impl>())
{
    if (a_.rows() != a_.cols())
        throw FemError("SPD solve needs a square matrix");
    a_.makeCompressed();
    impl_->llt.compute(a_);
    if (impl_->llt.info() != Eigen::Success) {
        direct_ = false;
        impl_->cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * a_.rows()));
        impl_->cg.compute(a_);
        if (impl_->cg.info() != Eigen::Success)
            throw SolverError("SPD factorization and preconditioner setup both failed", INFINITY);
    }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Eigen::VectorXd SpdSolver::apply_inverse(const Eigen::VectorXd& b) const
{
    if (direct_)
        return impl_->llt.solve(b);
    impl_->cg.setTolerance(1e-14);
    return impl_->cg.solve(b);
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b, double tol) const
{
    if (b.size() != a_.rows())
        throw FemError("SPD solve: right-hand side has the wrong size");
    if (b.squaredNorm() == 0.0)
        return Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd x = apply_inverse(b);
    double res = relative_residual(a_, x, b);
    for (int pass = 0; pass < 3 && res > tol; ++pass) {
        x += apply_inverse(b - a_ * x);
        res = relative_residual(a_, x, b);
    }
    if (!(res <= tol))
        throw SolverError("SPD solve did not reach the residual tolerance", res);
    return x;
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, double tol)
{
    return SpdSolver(a).solve(b, tol);
}

// Saddle point -------------------------------------------------------------------

SparseMatrix SaddleSystem::assembled() const
{
    const int n = num_primal();
    const int m = num_multipliers();
    std::vector<Triplet> t;
    t.reserve(primal.nonZeros() + 2 * constraint.nonZeros());
    for (int k = 0; k < primal.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(primal, k); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < constraint.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(constraint, k); it; ++it) {
            t.emplace_back(n + it.row(), it.col(), it.value());
            t.emplace_back(it.col(), n + it.row(), it.value());
        }
    return compress(std::move(t), n + m, n + m);
}

Eigen::VectorXd SaddleSystem::assembled_rhs() const
{
    Eigen::VectorXd b(num_primal() + num_multipliers());
    b << rhs_primal, rhs_constraint;
    return b;
}

namespace {

void check_shapes(const SaddleSystem& s)
{
    const int n = s.num_primal();
    const int m = s.num_multipliers();
    if (s.primal.cols() != n || s.constraint.cols() != n || s.weights.size() != m ||
        s.rhs_primal.size() != n || s.rhs_constraint.size() != m)
        throw FemError("saddle system blocks have inconsistent sizes");
    if (m > 0 && !(s.weights.minCoeff() > 0))
        throw FemError("saddle system multiplier weights must be positive");
}

double full_residual(const SaddleSystem& s, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                     Eigen::VectorXd* r_primal = nullptr, Eigen::VectorXd* r_constraint = nullptr)
{
    Eigen::VectorXd r1 = s.rhs_primal - s.primal * x - s.constraint.transpose() * p;
    Eigen::VectorXd r2 = s.rhs_constraint - s.constraint * x;
    const double nb = std::sqrt(s.rhs_primal.squaredNorm() + s.rhs_constraint.squaredNorm());
    const double nr = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    if (r_primal)
        *r_primal = std::move(r1);
    if (r_constraint)
        *r_constraint = std::move(r2);
    return nb > 0 ? nr / nb : nr;
}

SaddleSolution solve_sparse_lu(const SaddleSystem& s, double tol)
{
    const SparseMatrix k = s.assembled();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success)
        throw SolverError("sparse LU of the saddle system failed: " + lu.lastErrorMessage(),
                          INFINITY);
    const Eigen::VectorXd b = s.assembled_rhs();
    Eigen::VectorXd z = lu.solve(b);
    for (int pass = 0; pass < 3 && relative_residual(k, z, b) > tol; ++pass)
        z += lu.solve(b - k * z);
    SaddleSolution sol;
    sol.primal = z.head(s.num_primal());
    sol.multiplier = z.tail(s.num_multipliers());
    sol.residual = relative_residual(k, z, b);
    return sol;
}

// Solves the saddle system approximately for residual right-hand sides
// (f, g) using the augmented factorization and a Schur complement PCG.
struct AugmentedSchur {
    const SaddleSystem& s;
    Eigen::VectorXd inv_w;
    double gamma = 0.0;
    std::unique_ptr<SpdSolver> factor;
    int max_iterations = 500;

    AugmentedSchur(const SaddleSystem& system, double augmentation, int max_it)
        : s(system)
        , max_iterations(max_it)
    {
        inv_w = s.weights.cwiseInverse();
        const SparseMatrix btwb = SparseMatrix(s.constraint.transpose()) * inv_w.asDiagonal() *
                                  s.constraint;
        const double scale_a = s.primal.diagonal().cwiseAbs().sum();
        const double scale_b = btwb.diagonal().sum();
        gamma = augmentation * (scale_b > 0 && scale_a > 0 ? scale_a / scale_b : 1.0);
        factor = std::make_unique<SpdSolver>(SparseMatrix(s.primal + gamma * btwb));
    }

    // Returns the number of PCG iterations.
    int solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& x,
              Eigen::VectorXd& p) const
    {
        const SparseMatrix& b = s.constraint;
        const Eigen::VectorXd f_aug = f + gamma * (b.transpose() * inv_w.cwiseProduct(g));
        const Eigen::VectorXd x0 = factor->apply_inverse(f_aug);

        // S p = B A_γ⁻¹ f_γ − g with S = B A_γ⁻¹ Bᵀ, preconditioned by γ W⁻¹.
        auto apply_schur = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
            return b * factor->apply_inverse(b.transpose() * v);
        };
        const Eigen::VectorXd rhs = b * x0 - g;
        p = Eigen::VectorXd::Zero(rhs.size());
        Eigen::VectorXd r = rhs;
        Eigen::VectorXd z = gamma * inv_w.cwiseProduct(r);
        Eigen::VectorXd d = z;
        double rz = r.dot(z);
        const double r0 = rhs.norm();
        int it = 0;
        while (r0 > 0 && r.norm() > 1e-14 * r0 && it < max_iterations) {
            const Eigen::VectorXd sd = apply_schur(d);
            const double alpha = rz / d.dot(sd);
            p += alpha * d;
            r -= alpha * sd;
            z = gamma * inv_w.cwiseProduct(r);
            const double rz_new = r.dot(z);
            d = z + (rz_new / rz) * d;
            rz = rz_new;
            ++it;
        }
        x = x0 - factor->apply_inverse(b.transpose() * p);
        return it;
    }
};

// Block-diagonal preconditioner diag(IC(A_γ)⁻¹, c W⁻¹) for MINRES on the
// augmented system. Set up explicitly; compute() is a no-op.
class BlockPreconditioner {
public:
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

    void setup(const SparseMatrix& a_gamma, Eigen::VectorXd multiplier_scale)
    {
        ic_.compute(a_gamma);
        if (ic_.info() != Eigen::Success)
            throw SolverError("incomplete Cholesky of the augmented block failed", INFINITY);
        n_ = static_cast<int>(a_gamma.rows());
        scale_ = std::move(multiplier_scale);
    }

    template <class M>
    BlockPreconditioner& analyzePattern(const M&) { return *this; }
    template <class M>
    BlockPreconditioner& factorize(const M&) { return *this; }
    template <class M>
    BlockPreconditioner& compute(const M&) { return *this; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const
    {
        Eigen::VectorXd z(b.size());
        z.head(n_) = ic_.solve(b.head(n_));
        z.tail(b.size() - n_) = scale_.cwiseProduct(b.tail(b.size() - n_));
        return z;
    }

    Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
    Eigen::IncompleteCholesky<double, Eigen::Lower> ic_;
    Eigen::VectorXd scale_;
    int n_ = 0;
};

SaddleSolution solve_minres(const SaddleSystem& s, const SaddleOptions& options, double tol)
{
    const int n = s.num_primal();
    const Eigen::VectorXd inv_w = s.weights.cwiseInverse();
    const SparseMatrix btwb =
        SparseMatrix(s.constraint.transpose()) * inv_w.asDiagonal() * s.constraint;
    const double scale_a = s.primal.diagonal().cwiseAbs().sum();
    const double scale_b = btwb.diagonal().sum();
    const double rho = options.iterative_augmentation;
    const double gamma = rho * (scale_b > 0 && scale_a > 0 ? scale_a / scale_b : 1.0);

    // Same solution as the original system: the constraint row is added to
    // the primal rows with weight γ W⁻¹.
    SaddleSystem aug = s;
    aug.primal = SparseMatrix(s.primal + gamma * btwb);
    aug.rhs_primal = s.rhs_primal + gamma * (s.constraint.transpose() * inv_w.cwiseProduct(s.rhs_constraint));
    const SparseMatrix k = aug.assembled();
    const Eigen::VectorXd b = aug.assembled_rhs();

    // B A_γ⁻¹ Bᵀ ≈ (γ (1 + 1/ρ))⁻¹ W when B A⁻¹ Bᵀ scales like W.
    Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, BlockPreconditioner> minres;
    minres.preconditioner().setup(aug.primal, (gamma * (1.0 + 1.0 / rho)) * inv_w);
    minres.compute(k);
    minres.setMaxIterations(options.max_iterations * 20);
    minres.setTolerance(1e-2 * tol);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(b.size());
    SaddleSolution sol;
    for (int pass = 0; pass < 4; ++pass) {
        const Eigen::VectorXd r = b - k * z;
        if (!(r.norm() > 1e-2 * tol * b.norm()))
            break;
        z += minres.solve(r);
        sol.iterations += static_cast<int>(minres.iterations());
    }
    sol.primal = z.head(n);
    sol.multiplier = z.tail(s.num_multipliers());
    return sol;
}

SaddleSolution solve_augmented(const SaddleSystem& s, const SaddleOptions& options)
{
    const AugmentedSchur solver(s, options.augmentation, options.max_iterations);
    SaddleSolution sol;
    sol.iterations = solver.solve(s.rhs_primal, s.rhs_constraint, sol.primal, sol.multiplier);
    Eigen::VectorXd r1, r2;
    sol.residual = full_residual(s, sol.primal, sol.multiplier, &r1, &r2);
    for (int pass = 0; pass < 3 && sol.residual > 1e-2 * options.tol; ++pass) {
        Eigen::VectorXd dx, dp;
        sol.iterations += solver.solve(r1, r2, dx, dp);
        sol.primal += dx;
        sol.multiplier += dp;
        const double res = full_residual(s, sol.primal, sol.multiplier, &r1, &r2);
        if (!(res < sol.residual)) {
            sol.residual = res;
            break;
        }
        sol.residual = res;
    }
    return sol;
}

}  // namespace

SaddleSolution solve_saddle(const SaddleSystem& system, const SaddleOptions& options)
{
    check_shapes(system);
    if (system.rhs_primal.squaredNorm() + system.rhs_constraint.squaredNorm() == 0.0) {
        SaddleSolution zero;
        zero.primal = Eigen::VectorXd::Zero(system.num_primal());
        zero.multiplier = Eigen::VectorXd::Zero(system.num_multipliers());
        return zero;
    }
    SaddleMethod method = options.method;
    double tol = options.tol;
    if (method == SaddleMethod::Auto) {
        const bool large = system.num_primal() + system.num_multipliers() > options.direct_limit;
        method = large ? SaddleMethod::Minres : SaddleMethod::AugmentedSchur;
        if (large)
            tol = std::max(tol, options.iterative_tol);
    }
    SaddleSolution sol;
    switch (method) {
    case SaddleMethod::SparseLU:
        sol = solve_sparse_lu(system, tol);
        break;
    case SaddleMethod::Minres:
        sol = solve_minres(system, options, tol);
        break;
    default:
        sol = solve_augmented(system, options);
    }
    sol.residual = full_residual(system, sol.primal, sol.multiplier);
    if (!(sol.residual <= tol))
        throw SolverError("saddle-point solve did not reach the residual tolerance",
                          sol.residual);
    return sol;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a)
{
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    os << std::setprecision(17);
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& a)
{
    std::ofstream os(path);
    if (!os)
        throw FemError("cannot open " + path);
    write_matrix_market(os, a);
}

}  // namespace ncfem
