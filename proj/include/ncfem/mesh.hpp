#pragma once

#include <array>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncfem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base exception for invalid geometry, mismatched dof maps and the like.
class FemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Local edge k of a tetrahedron joins vertices kTetEdges[k][0] and kTetEdges[k][1].
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local face i of a tetrahedron is the face opposite local vertex i.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

struct Face {
    std::array<int, 3> vertices{};
    Vec3 normal = Vec3::Zero();  ///< global unit normal n_F
    Vec3 centroid = Vec3::Zero();
    double area = 0.0;
    double diameter = 0.0;                ///< h_F, longest edge
    std::array<int, 2> tets{-1, -1};      ///< tets[1] == -1 on the boundary
    bool boundary() const { return tets[1] < 0; }
};

struct Edge {
    std::array<int, 2> vertices{};
    double length = 0.0;
    bool boundary = false;
};

struct Tet {
    std::array<int, 4> vertices{};
    std::array<int, 4> faces{};       ///< global face opposite each local vertex
    std::array<int, 4> face_signs{};  ///< n_F · n_{∂T}, exactly +1 or -1
    std::array<int, 6> edges{};       ///< global edge per kTetEdges entry
    std::array<Vec3, 4> grad_lambda;  ///< barycentric gradients (constant)
    Vec3 centroid = Vec3::Zero();
    double volume = 0.0;
    double diameter = 0.0;
};

/// Conforming tetrahedral mesh with oriented faces and edges.
///
/// Faces and edges are numbered in order of first appearance when walking the
/// tets in index order. The global face normal points out of the lower
/// indexed neighbour, which is outward on the boundary.
class Mesh {
public:
    /// Builds topology and geometry from positively oriented tets.
    /// Throws FemError on non-positive volumes or non-manifold faces.
    Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

    std::span<const Vec3> vertices() const { return vertices_; }
    std::span<const Tet> tets() const { return tets_; }
    std::span<const Face> faces() const { return faces_; }
    std::span<const Edge> edges() const { return edges_; }

    const Vec3& vertex(int i) const { return vertices_[i]; }
    const Tet& tet(int t) const { return tets_[t]; }
    const Face& face(int f) const { return faces_[f]; }
    const Edge& edge(int e) const { return edges_[e]; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_tets() const { return static_cast<int>(tets_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_boundary_faces() const;

    /// Label used in convergence tables (1/n for the structured builders).
    double mesh_size() const { return mesh_size_; }
    void set_mesh_size(double h) { mesh_size_ = h; }

    double total_volume() const;
    double max_diameter() const;

    /// Physical point of barycentric coordinates `bary` on tet t.
    Vec3 point(int t, std::span<const double, 4> bary) const;
    /// Physical point of barycentric coordinates `bary` on face f.
    Vec3 face_point(int f, std::span<const double, 3> bary) const;

    /// Local index (0..3) of global face f inside tet t, or -1.
    int local_face(int t, int f) const;

private:
    void extract_topology();

    std::vector<Vec3> vertices_;
    std::vector<Tet> tets_;
    std::vector<Face> faces_;
    std::vector<Edge> edges_;
    double mesh_size_ = 0.0;
};

/// Unit cube (0,1)^3, n^3 subcubes each split into 6 Kuhn tetrahedra.
Mesh build_cube_mesh(int n);

/// (-1,1)x(0,1)x(-1,1) minus the closed unit cube [0,1]^3, cubes of edge 1/n.
Mesh build_lshape_mesh(int n);

/// Barycentric coordinates of x with respect to tet t.
std::array<double, 4> barycentric(const Mesh& mesh, int t, const Vec3& x);

/// Inradius of tet t (3|T| / total surface area).
double inradius(const Mesh& mesh, int t);

/// Cell field written alongside the mesh by write_vtk.
struct CellField {
    std::string name;
    int components = 1;
    std::vector<double> values;  ///< num_tets * components, tet-major
};

/// Legacy ASCII VTK unstructured grid.
void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const CellField> fields = {});
void write_vtk(const std::string& path, const Mesh& mesh, std::span<const CellField> fields = {});

}  // namespace ncfem
