#pragma once

#include <array>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncfem/elements.hpp"
#include "ncfem/mesh.hpp"

namespace ncfem {

using ComponentFunction = std::function<Eigen::VectorXd(const Vec3&)>;
using ComponentGradient = std::function<Eigen::MatrixXd(const Vec3&)>;  ///< components x 3
using TensorGradientFunction = std::function<std::array<Mat3, 3>(const Vec3&)>;

inline constexpr int kErrorQuadratureDegree = 6;

/// ‖v − v_h‖ for a CR field given componentwise.
double cr_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const ComponentFunction& exact, int degree = kErrorQuadratureDegree);

/// |v − v_h|_{1,h} for a CR field given componentwise.
double cr_error_h1(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const ComponentGradient& exact_gradient, int degree = kErrorQuadratureDegree);

/// ‖σ − σ_h‖ and |σ − σ_h|_{1,h} for a CR-sym field; d[k] = ∂_k σ.
double sym_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                    const TensorFunction& exact, int degree = kErrorQuadratureDegree);
double sym_error_h1(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                    const TensorGradientFunction& exact_gradient,
                    int degree = kErrorQuadratureDegree);

/// (Σ_F h_F⁻¹ ‖[v]‖²_F)^{1/2} over all faces, boundary faces included.
double jump_seminorm(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                     int degree = 2);

/// ⦀v⦀_{1,h} = (|v|²_{1,h} + Σ_F h_F⁻¹ ‖[v]‖²_F)^{1/2}.
double triple_norm(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs);

/// |u − u_h|_{1,h} and |u − u_h|_{2,h} for an MWX field.
double mwx_error_h1(const Mesh& mesh, const DofMap& map, std::span<const MwxLocalBasis> bases,
                    const Eigen::VectorXd& coeffs, const VectorFunction& exact_gradient,
                    int degree = kErrorQuadratureDegree);
double mwx_error_h2(const Mesh& mesh, const DofMap& map, std::span<const MwxLocalBasis> bases,
                    const Eigen::VectorXd& coeffs, const TensorFunction& exact_hessian,
                    int degree = kErrorQuadratureDegree);

/// ‖p − p_h‖ for a P0 traceless field; only dev(exact) is compared.
double p0_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const TensorFunction& exact, int degree = kErrorQuadratureDegree);

/// ‖curl_h σ_h + dev grad_h r_h‖.
double identity_residual(const Mesh& mesh, const DofMap& cr_sym, const Eigen::VectorXd& sigma,
                         const DofMap& cr_vector, const Eigen::VectorXd& r);

/// Estimated orders log(e_{k−1}/e_k) / log(h_{k−1}/h_k); the first entry and
/// any entry involving a zero error are empty.
std::vector<std::optional<double>> eoc(std::span<const double> h,
                                       std::span<const double> errors);

struct ErrorColumn {
    std::string key;    ///< CSV header
    std::string label;  ///< markdown header
    std::vector<double> values;
    bool with_rate = true;
};

/// Per-level error table with rates between consecutive levels.
struct ErrorReport {
    std::string title;
    std::vector<int> levels;
    std::vector<double> h;
    std::vector<ErrorColumn> columns;

    const ErrorColumn& column(const std::string& key) const;
    std::vector<std::optional<double>> rates(const std::string& key) const;
    /// Rate between the last two levels.
    std::optional<double> last_rate(const std::string& key) const;
};

/// CSV: level,h,<key>[,rate]... with empty rate cells where undefined.
void write_csv(std::ostream& os, const ErrorReport& report);
/// Aligned markdown table in the same column order.
void write_markdown(std::ostream& os, const ErrorReport& report);

}  // namespace ncfem
