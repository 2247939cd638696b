#pragma once

#include <array>

#include <Eigen/Dense>

namespace ncfem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Sym3Coeffs = Eigen::Matrix<double, 6, 1>;
using Tless3Coeffs = Eigen::Matrix<double, 8, 1>;

/// Frobenius-orthonormal basis of symmetric matrices:
/// e_i⊗e_i (i = 0..2), then (e_i⊗e_j + e_j⊗e_i)/√2 for (0,1), (0,2), (1,2).
const std::array<Mat3, 6>& sym_basis();

/// Frobenius-orthonormal basis of traceless matrices:
/// e_i⊗e_j for the six off-diagonal (i,j) in row-major order, then
/// (e_0⊗e_0 − e_1⊗e_1)/√2 and (e_0⊗e_0 + e_1⊗e_1 − 2 e_2⊗e_2)/√6.
const std::array<Mat3, 8>& traceless_basis();

/// Symmetric 3x3 tensor stored by its coordinates in sym_basis().
struct Sym3 {
    Sym3Coeffs coeffs = Sym3Coeffs::Zero();

    /// Coordinates of the symmetric part of m.
    static Sym3 from_matrix(const Mat3& m);
    Mat3 matrix() const;
};

/// Traceless 3x3 tensor stored by its coordinates in traceless_basis().
struct Tless3 {
    Tless3Coeffs coeffs = Tless3Coeffs::Zero();

    /// Coordinates of the deviatoric part of m.
    static Tless3 from_matrix(const Mat3& m);
    Mat3 matrix() const;
};

double trace(const Mat3& a);
Tless3 dev(const Mat3& a);
Sym3 sym(const Mat3& a);

/// Axial vector w of the skew part, with 2 vskw(grad v) = curl v:
/// w = ((a21 − a12), (a02 − a20), (a10 − a01)) / 2 in zero-based indices.
Vec3 vskw(const Mat3& a);

/// Spatial derivatives of an affine tensor field: d[k](i,l) = ∂_k τ_il.
using TensorGradient = std::array<Mat3, 3>;

/// Row-wise curl, (curl τ)_ij = ε_jkl ∂_k τ_il.
Mat3 row_curl(const TensorGradient& d);

/// Row-wise divergence, (div τ)_i = ∂_l τ_il.
Vec3 row_div(const TensorGradient& d);

/// dev grad s for a vector field with Jacobian (grad s)_ij = ∂_j s_i.
Tless3 dev_grad(const Mat3& jacobian);

/// Frobenius inner product.
inline double ddot(const Mat3& a, const Mat3& b) { return a.cwiseProduct(b).sum(); }

}  // namespace ncfem
