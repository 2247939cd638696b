#pragma once

#include <array>
#include <vector>

namespace ncfem {

/// Quadrature on the reference simplex of dimension Dim. Points are stored in
/// barycentric coordinates; weights sum to the reference measure 1/Dim!.
template <int Dim>
struct SimplexRule {
    std::vector<std::array<double, Dim + 1>> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

using TetRule = SimplexRule<3>;
using TriRule = SimplexRule<2>;
using LineRule = SimplexRule<1>;

inline constexpr int kMaxQuadratureDegree = 6;

/// Rule exact for polynomials of total degree <= `degree` (0..6) on the
/// reference tetrahedron. Throws FemError otherwise. The returned reference
/// stays valid for the lifetime of the program.
const TetRule& tet_rule(int degree);
const TriRule& tri_rule(int degree);
const LineRule& line_rule(int degree);

/// Grundmann–Möller rule of index s (exact to degree 2s+1) on the Dim-simplex.
template <int Dim>
SimplexRule<Dim> grundmann_moller(int s);

}  // namespace ncfem
