#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ncfem/mesh.hpp"
#include "ncfem/tensor.hpp"

namespace ncfem {

/// Discrete spaces. CR spaces carry face DoFs (face averages), P0 spaces
/// element DoFs, and Morley-Wang-Xu (MWX) one DoF per face and per edge.
enum class Space { CrScalar, CrVector, CrSym, P0Traceless, Mwx };

/// Which boundary DoFs are eliminated. `Default` clamps CrSym and Mwx and
/// leaves CrScalar, CrVector and P0Traceless free.
enum class BoundaryPolicy { Default, Free, Clamped };

int components(Space space);

/// Global DoF numbering of one space on one mesh.
///
/// Entities are faces (CR), tets (P0), or faces followed by edges (MWX).
/// Constrained DoFs map to -1 and are absent from the global system.
class DofMap {
public:
    DofMap(Space space, int num_entities, std::vector<int> indices, int size);

    Space space() const { return space_; }
    int components() const { return components_; }
    int size() const { return size_; }
    int num_entities() const { return num_entities_; }

    /// Global index of (entity, component), or -1 when constrained.
    int index(int entity, int component = 0) const
    {
        return indices_[entity * components_ + component];
    }
    bool constrained(int entity, int component = 0) const { return index(entity, component) < 0; }

    /// Number of constrained (entity, component) pairs.
    int num_constrained() const;

private:
    Space space_;
    int components_;
    int num_entities_;
    int size_;
    std::vector<int> indices_;
};

DofMap build_dofmap(const Mesh& mesh, Space space,
                    BoundaryPolicy policy = BoundaryPolicy::Default);

/// Global indices of the local DoFs of tet t, local order:
/// CR: face-major then component; P0: component; MWX: 4 faces then 6 edges.
std::vector<int> local_dofs(const Mesh& mesh, const DofMap& map, int t);

/// Crouzeix–Raviart basis φ_i = 1 − 3λ_i on one tet, dual to face averages.
struct CrLocalBasis {
    std::array<Vec3, 4> gradients;

    static double value(int i, std::span<const double, 4> bary) { return 1.0 - 3.0 * bary[i]; }
};

/// Throws FemError on degenerate tets.
CrLocalBasis cr_local_basis(const Mesh& mesh, int t);

/// Quadratic MWX shape functions on one tet, dual to
/// { ∫_F ∇w·n_F dS over the 4 faces (global normals), ∫_e w ds over the 6 edges }.
class MwxLocalBasis {
public:
    static constexpr int kSize = 10;
    using Coeffs = Eigen::Matrix<double, kSize, 1>;
    using Matrix = Eigen::Matrix<double, kSize, kSize>;

    MwxLocalBasis(const Vec3& center, double scale, const Matrix& coeffs);

    double value(int b, const Vec3& x) const;
    Vec3 gradient(int b, const Vec3& x) const;
    const Mat3& hessian(int b) const { return hessians_[b]; }

    /// Evaluation of Σ_b c_b ψ_b.
    double value(const Coeffs& c, const Vec3& x) const;
    Vec3 gradient(const Coeffs& c, const Vec3& x) const;
    Mat3 hessian(const Coeffs& c) const;

    /// Column b holds the scaled-monomial coefficients of ψ_b.
    const Matrix& coefficients() const { return coeffs_; }

    /// Scaled monomials m_j((x − center)/scale), j = 0..9:
    /// 1, ξ0, ξ1, ξ2, ξ0², ξ1², ξ2², ξ0ξ1, ξ0ξ2, ξ1ξ2.
    Coeffs monomials(const Vec3& x) const;
    Eigen::Matrix<double, kSize, 3> monomial_gradients(const Vec3& x) const;
    std::array<Mat3, kSize> monomial_hessians() const;

private:
    Vec3 center_;
    double scale_;
    Matrix coeffs_;
    std::array<Mat3, kSize> hessians_;
};

/// DoF functionals of tet t applied to a quadratic given by its scaled
/// monomial expansion; row a is DoF a, column j monomial j.
MwxLocalBasis::Matrix mwx_dof_matrix(const Mesh& mesh, int t, const Vec3& center, double scale);

/// Builds the local MWX basis by inverting the DoF matrix. Throws FemError if
/// the DoF matrix condition number exceeds `max_condition`.
MwxLocalBasis mwx_local_basis(const Mesh& mesh, int t, double max_condition = 1e10);
std::vector<MwxLocalBasis> mwx_local_bases(const Mesh& mesh);

// Interpolation and projection ------------------------------------------------

using ScalarFunction = std::function<double(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;
using TensorFunction = std::function<Mat3(const Vec3&)>;

/// CR interpolant from face averages; the callback fills the component values.
Eigen::VectorXd interpolate_cr_components(
    const Mesh& mesh, const DofMap& map, const std::function<Eigen::VectorXd(const Vec3&)>& f,
    int degree = 4);
Eigen::VectorXd interpolate_cr(const Mesh& mesh, const DofMap& map, const ScalarFunction& f,
                               int degree = 4);
Eigen::VectorXd interpolate_cr_vector(const Mesh& mesh, const DofMap& map,
                                      const VectorFunction& f, int degree = 4);
/// Symmetric part of f, in sym_basis() coordinates.
Eigen::VectorXd interpolate_cr_sym(const Mesh& mesh, const DofMap& map, const TensorFunction& f,
                                   int degree = 4);

/// MWX interpolant from face normal-derivative integrals and edge integrals.
Eigen::VectorXd interpolate_mwx(const Mesh& mesh, const DofMap& map, const ScalarFunction& value,
                                const VectorFunction& gradient, int degree = 4);

/// Elementwise L2 projection of the deviatoric part of f onto P0(T_h; 𝕋).
Eigen::VectorXd project_p0_traceless(const Mesh& mesh, const DofMap& map,
                                     const TensorFunction& f, int degree = 4);

// Local field access -----------------------------------------------------------

/// 4 x components matrix of face values of a CR field on tet t (0 where constrained).
Eigen::MatrixXd cr_local_values(const Mesh& mesh, const DofMap& map,
                                const Eigen::VectorXd& coeffs, int t);

/// CR field value (components) at barycentric point of tet t.
Eigen::VectorXd cr_value(const Eigen::MatrixXd& local, std::span<const double, 4> bary);

/// Constant CR gradient, components x 3.
Eigen::MatrixXd cr_gradient(const CrLocalBasis& basis, const Eigen::MatrixXd& local);

/// Local coefficient vector of an MWX field on tet t (0 where constrained).
MwxLocalBasis::Coeffs mwx_local_coeffs(const Mesh& mesh, const DofMap& map,
                                       const Eigen::VectorXd& coeffs, int t);

/// Constant broken Hessian of an MWX field per tet.
std::vector<Mat3> mwx_broken_hessian(const Mesh& mesh, const DofMap& map,
                                     std::span<const MwxLocalBasis> bases,
                                     const Eigen::VectorXd& coeffs);

}  // namespace ncfem
