#pragma once

#include <array>

#include "ncfem/tensor.hpp"

namespace ncfem {

/// u(x, y, z) = A sin³(πx) sin³(πy) sin³(πz) and its derivatives.
///
/// Each factor is expanded as sin³t = (3 sin t − sin 3t)/4, so every partial
/// derivative is a product of three closed-form one-dimensional derivatives.
class SineCubed {
public:
    explicit SineCubed(double amplitude = 1.0) : amplitude_(amplitude) {}

    double amplitude() const { return amplitude_; }

    /// ∂^α u at x.
    double derivative(const Vec3& x, const std::array<int, 3>& alpha) const;

    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    /// σ = ∇²u.
    Mat3 hessian(const Vec3& x) const;
    /// third[k](i, j) = ∂_i∂_j∂_k u, i.e. ∂_k σ_ij.
    std::array<Mat3, 3> third(const Vec3& x) const;

    /// f = −Δ³u, the triharmonic forcing.
    double forcing(const Vec3& x) const;
    /// g = −Δσ = −∇²(Δu), the Stokes load for which (σ, p, r) = (∇²u, 0, 0).
    Mat3 stokes_load(const Vec3& x) const;

private:
    double amplitude_;
};

/// d^m/dt^m of sin³(πt).
double sin_cubed_derivative(double t, int m);

}  // namespace ncfem
