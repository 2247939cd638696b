#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncfem/elements.hpp"
#include "ncfem/errors.hpp"
#include "ncfem/linsolve.hpp"
#include "ncfem/manufactured.hpp"
#include "ncfem/mesh.hpp"

namespace ncfem {

enum class Domain { Cube, LShape };
enum class Mode { Triharmonic, StokesOnly };
enum class OutputFormat { Csv, Markdown };

Domain parse_domain(const std::string& s);
Mode parse_mode(const std::string& s);
OutputFormat parse_format(const std::string& s);
std::string to_string(Domain d);
std::string to_string(Mode m);

/// Levels used when none are given: {1,2,4,8} on the cube, {2,4,8} on the L-shape.
std::vector<int> default_levels(Domain d);

/// Largest level accepted without `allow_heavy`.
inline constexpr int kMaxDefaultLevel = 8;

struct RunConfig {
    Domain domain = Domain::Cube;
    std::vector<int> levels;  ///< subdivisions n per unit length, h = 1/n; empty = defaults
    Mode mode = Mode::Triharmonic;
    int quad_err = kErrorQuadratureDegree;
    int quad_load = 4;
    double solver_tol = 1e-10;
    double identity_tol = 1e-8;
    std::string out;         ///< empty = stdout
    OutputFormat format = OutputFormat::Csv;
    std::string export_vtk;  ///< path prefix; empty = no export
    bool allow_heavy = false;

    /// Levels with defaults filled in.
    std::vector<int> resolved_levels() const;
    /// Throws FemError on unsorted levels, non-positive tolerances, bad
    /// quadrature degrees, or levels above kMaxDefaultLevel without allow_heavy.
    void validate() const;
};

Mesh build_domain_mesh(Domain d, int n);

/// Discrete solution of the decoupled triharmonic problem on one mesh.
struct TriharmonicSolution {
    DofMap mwx, cr_sym, cr_vector, p0;
    std::vector<MwxLocalBasis> bases{};
    Eigen::VectorXd w{}, sigma{}, r{}, p{}, u{};
    int stokes_iterations = 0;
};

/// Biharmonic solve for w_h, generalized Stokes solve with g_h = ∇²_h w_h,
/// then biharmonic solve for u_h with load (σ_h, ∇²_h χ).
TriharmonicSolution solve_triharmonic(const Mesh& mesh, const ScalarFunction& f,
                                      int quad_load = 4, double solver_tol = 1e-10);

/// Generalized Stokes solution for elementwise constant data g_h.
struct StokesSolution {
    DofMap cr_sym, cr_vector, p0;
    Eigen::VectorXd sigma{}, r{}, p{};
    int iterations = 0;
};

StokesSolution solve_generalized_stokes(const Mesh& mesh, std::span<const Sym3> g_h,
                                        double solver_tol = 1e-10);

/// Convergence table for the decoupled triharmonic method.
/// CSV columns: level,h,err_sigma_l2,rate,err_sigma_h1,rate,err_u_h1,rate,
/// err_u_h2,rate,jump_r,identity_residual.
ErrorReport run_triharmonic(const RunConfig& config, const SineCubed& exact = SineCubed());

/// Convergence table for the Stokes problem with σ = ∇²u, p = 0, r = 0.
/// CSV columns: level,h,err_sigma_l2,rate,err_sigma_h1,rate,err_p_l2,rate,
/// jump_r,rate,identity_residual.
ErrorReport run_stokes_only(const RunConfig& config, const SineCubed& exact = SineCubed());

/// Dispatches on config.mode.
ErrorReport run_experiment(const RunConfig& config, const SineCubed& exact = SineCubed());

void write_report(std::ostream& os, const ErrorReport& report, OutputFormat format);

}  // namespace ncfem
