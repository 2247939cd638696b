#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncfem/elements.hpp"
#include "ncfem/linsolve.hpp"
#include "ncfem/mesh.hpp"
#include "ncfem/tensor.hpp"

namespace ncfem {

/// (∇²_h w, ∇²_h v) on an MWX space; entry Σ_T |T| H_a : H_b.
SparseMatrix assemble_biharmonic(const Mesh& mesh, const DofMap& mwx,
                                 std::span<const MwxLocalBasis> bases);

/// (f, v) for MWX test functions with a tet rule of the given degree.
Eigen::VectorXd assemble_load_scalar(const Mesh& mesh, const DofMap& mwx,
                                     std::span<const MwxLocalBasis> bases,
                                     const ScalarFunction& f, int degree = 4);

/// Broken H1 stiffness of a CR space, component by component.
SparseMatrix assemble_cr_stiffness(const Mesh& mesh, const DofMap& cr);

/// Σ_F h_F⁻¹ ([r], [s])_F over all faces, boundary faces included.
SparseMatrix assemble_jump_penalty(const Mesh& mesh, const DofMap& cr, int degree = 2);

/// (curl_h τ, q) with rows in the P0 traceless space, columns in CR-sym.
SparseMatrix assemble_curl_block(const Mesh& mesh, const DofMap& cr_sym, const DofMap& p0);

/// (dev grad_h s, q) with rows in the P0 traceless space, columns in CR-vector.
SparseMatrix assemble_devgrad_block(const Mesh& mesh, const DofMap& cr_vector,
                                    const DofMap& p0);

/// (q, q) weights of the orthonormal P0 traceless basis: |T| per DoF.
Eigen::VectorXd p0_weights(const Mesh& mesh, const DofMap& p0);

/// (g_h, τ) for an elementwise constant symmetric g_h.
Eigen::VectorXd assemble_sym_load(const Mesh& mesh, const DofMap& cr_sym,
                                  std::span<const Sym3> g_h);

/// Discrete generalized Stokes system. Primal unknowns are [σ; r]
/// (CR-sym interior DoFs, then CR-vector DoFs); multipliers are p.
struct StokesSystem {
    SaddleSystem saddle;
    int num_sigma = 0;
    int num_r = 0;
    int num_p = 0;

    SparseMatrix stiffness;  ///< A_σ
    SparseMatrix penalty;    ///< J
    SparseMatrix curl;       ///< B_σ
    SparseMatrix devgrad;    ///< B_s
};

StokesSystem assemble_stokes(const Mesh& mesh, const DofMap& cr_sym, const DofMap& cr_vector,
                             const DofMap& p0, std::span<const Sym3> g_h);

/// (∇²_h w_h, τ) for CR-sym test functions.
Eigen::VectorXd assemble_hessian_load(const Mesh& mesh, const DofMap& mwx,
                                      std::span<const MwxLocalBasis> bases,
                                      const Eigen::VectorXd& w, const DofMap& cr_sym);

/// (σ_h, ∇²_h χ) for MWX test functions.
Eigen::VectorXd assemble_sigma_load(const Mesh& mesh, const DofMap& cr_sym,
                                    const Eigen::VectorXd& sigma, const DofMap& mwx,
                                    std::span<const MwxLocalBasis> bases);

}  // namespace ncfem
