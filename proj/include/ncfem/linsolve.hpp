#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ncfem/mesh.hpp"

namespace ncfem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Compresses triplets into a sparse matrix. Triplets are stably sorted by
/// (col, row) and duplicates summed in generation order, so the result is
/// bit-identical for identical input sequences.
SparseMatrix compress(std::vector<Triplet> triplets, int rows, int cols);

/// Linear solve failure; carries the relative residual that was reached.
class SolverError : public FemError {
public:
    SolverError(const std::string& what, double residual)
        : FemError(what + " (relative residual " + std::to_string(residual) + ")")
        , residual_(residual)
    {
    }
    double residual() const { return residual_; }

private:
    double residual_;
};

/// ‖Ax − b‖ / ‖b‖, or ‖Ax‖ when b = 0.
double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b);

/// Reusable Cholesky factorization of an SPD matrix (CHOLMOD supernodal),
/// with a preconditioned CG fallback when the factorization breaks down.
class SpdSolver {
public:
    explicit SpdSolver(SparseMatrix a);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    /// Solves A x = b and enforces ‖Ax − b‖/‖b‖ <= tol, refining once or
    /// twice if needed. Throws SolverError otherwise.
    Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol = 1e-10) const;

    /// Raw factor solve without residual control.
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b) const;

    const SparseMatrix& matrix() const { return a_; }
    bool direct() const { return direct_; }

private:
    struct Impl;
    SparseMatrix a_;
    std::unique_ptr<Impl> impl_;
    bool direct_ = true;
};

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-10);

/// Symmetric saddle-point system
///   [ A  Bᵀ ] [x]   [f]
///   [ B  0  ] [p] = [g]
/// with A symmetric positive semidefinite and coercive on ker B, B of full
/// row rank, and W a positive diagonal weight for the multiplier space.
struct SaddleSystem {
    SparseMatrix primal;      ///< A
    SparseMatrix constraint;  ///< B
    Eigen::VectorXd weights;  ///< diag(W)
    Eigen::VectorXd rhs_primal;
    Eigen::VectorXd rhs_constraint;

    int num_primal() const { return static_cast<int>(primal.rows()); }
    int num_multipliers() const { return static_cast<int>(constraint.rows()); }

    SparseMatrix assembled() const;
    Eigen::VectorXd assembled_rhs() const;
};

enum class SaddleMethod {
    /// AugmentedSchur up to direct_limit unknowns, Minres beyond.
    Auto,
    /// Cholesky of A + γBᵀW⁻¹B and PCG on the multiplier Schur complement.
    AugmentedSchur,
    /// Sparse LU of the assembled indefinite matrix (small problems, reference).
    SparseLU,
    /// MINRES on the augmented system, preconditioned by incomplete Cholesky
    /// of the augmented primal block and a scaled W⁻¹.
    Minres,
};

struct SaddleOptions {
    double tol = 1e-10;
    SaddleMethod method = SaddleMethod::Auto;
    /// γ relative to the diagonal scale ratio of A and BᵀW⁻¹B.
    double augmentation = 100.0;
    int max_iterations = 500;
    /// Auto switches to the iterative method above this many unknowns and
    /// then accepts max(tol, iterative_tol).
    int direct_limit = 300000;
    double iterative_tol = 1e-9;
    /// Smaller γ for Minres keeps the incomplete factorization usable.
    double iterative_augmentation = 1.0;
};

struct SaddleSolution {
    Eigen::VectorXd primal;
    Eigen::VectorXd multiplier;
    double residual = 0.0;
    int iterations = 0;
};

/// Solves the saddle system; the relative residual of the assembled system is
/// checked after the solve and SolverError thrown when it exceeds tol.
SaddleSolution solve_saddle(const SaddleSystem& system, const SaddleOptions& options = {});

/// MatrixMarket coordinate (real general) export.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);

}  // namespace ncfem
