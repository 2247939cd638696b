#include "ncfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>

namespace ncfem {

namespace {

using FaceKey = std::array<int, 3>;
using EdgeKey = std::array<int, 2>;

FaceKey sorted_key(int a, int b, int c)
{
    FaceKey k{a, b, c};
    std::sort(k.begin(), k.end());
    return k;
}

EdgeKey sorted_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Structured cube grid with an optional set of omitted cells. Vertex ids are
// assigned in lexicographic (k, j, i) order over the used grid points only.
template <class KeepCell>
Mesh build_grid_mesh(const Vec3& origin, std::array<int, 3> cells, double spacing,
                     KeepCell keep)
{
    const int nx = cells[0], ny = cells[1], nz = cells[2];
    auto grid_id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    std::vector<int> used((nx + 1) * (ny + 1) * (nz + 1), -1);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!keep(i, j, k))
                    continue;
                for (int c = 0; c < 8; ++c)
                    used[grid_id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))] = 0;
            }

    std::vector<Vec3> vertices;
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                int& id = used[grid_id(i, j, k)];
                if (id < 0)
                    continue;
                id = static_cast<int>(vertices.size());
                vertices.emplace_back(origin + spacing * Vec3(i, j, k));
            }

    // Kuhn split: one tet per permutation of the axes, walking from the low
    // corner to the high corner of the cube.
    static constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    std::vector<std::array<int, 4>> tets;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!keep(i, j, k))
                    continue;
                for (const auto& p : perms) {
                    std::array<int, 3> c{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = used[grid_id(c[0], c[1], c[2])];
                    for (int s = 0; s < 3; ++s) {
                        ++c[p[s]];
                        tet[s + 1] = used[grid_id(c[0], c[1], c[2])];
                    }
                    const Vec3& v0 = vertices[tet[0]];
                    Mat3 m;
                    m << vertices[tet[1]] - v0, vertices[tet[2]] - v0, vertices[tet[3]] - v0;
                    if (m.determinant() < 0)
                        std::swap(tet[2], tet[3]);
                    tets.push_back(tet);
                }
            }

    Mesh mesh(std::move(vertices), std::move(tets));
    mesh.set_mesh_size(spacing);
    return mesh;
}

}  // namespace

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets)
    : vertices_(std::move(vertices))
{
    tets_.resize(tets.size());
    for (std::size_t t = 0; t < tets.size(); ++t) {
        Tet& tet = tets_[t];
        tet.vertices = tets[t];
        for (int v : tet.vertices)
            if (v < 0 || v >= num_vertices())
                throw FemError("tet " + std::to_string(t) + " references a missing vertex");

        const Vec3& v0 = vertices_[tet.vertices[0]];
        Mat3 m;
        m << vertex(tet.vertices[1]) - v0, vertex(tet.vertices[2]) - v0,
            vertex(tet.vertices[3]) - v0;
        const double det = m.determinant();
        if (!(det > 0.0))
            throw FemError("tet " + std::to_string(t) + " is not positively oriented");
        tet.volume = det / 6.0;

        const Mat3 inv = m.inverse();
        tet.grad_lambda[0] = -(inv.row(0) + inv.row(1) + inv.row(2)).transpose();
        for (int i = 0; i < 3; ++i)
            tet.grad_lambda[i + 1] = inv.row(i).transpose();

        tet.centroid = Vec3::Zero();
        for (int v : tet.vertices)
            tet.centroid += vertex(v) / 4.0;
        for (const auto& e : kTetEdges)
            tet.diameter = std::max(
                tet.diameter, (vertex(tet.vertices[e[0]]) - vertex(tet.vertices[e[1]])).norm());
    }
    extract_topology();
    mesh_size_ = max_diameter();
}

void Mesh::extract_topology()
{
    std::map<FaceKey, int> face_ids;
    std::map<EdgeKey, int> edge_ids;

    for (int t = 0; t < num_tets(); ++t) {
        Tet& tet = tets_[t];
        for (int i = 0; i < 4; ++i) {
            const auto& lf = kTetFaces[i];
            const FaceKey key =
                sorted_key(tet.vertices[lf[0]], tet.vertices[lf[1]], tet.vertices[lf[2]]);
            const Vec3 outward = -tet.grad_lambda[i].normalized();
            auto [it, inserted] = face_ids.try_emplace(key, num_faces());
            if (inserted) {
                Face face;
                face.vertices = key;
                face.tets = {t, -1};
                face.normal = outward;
                const Vec3& a = vertex(key[0]);
                const Vec3& b = vertex(key[1]);
                const Vec3& c = vertex(key[2]);
                face.area = 0.5 * (b - a).cross(c - a).norm();
                face.centroid = (a + b + c) / 3.0;
                face.diameter = std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
                faces_.push_back(face);
            }
            else {
                Face& face = faces_[it->second];
                if (face.tets[1] >= 0)
                    throw FemError("non-manifold mesh: face shared by more than two tets");
                face.tets[1] = t;
            }
            tet.faces[i] = it->second;
            const double s = faces_[it->second].normal.dot(outward);
            if (std::abs(std::abs(s) - 1.0) > 1e-8)
                throw FemError("inconsistent face normal on tet " + std::to_string(t));
            tet.face_signs[i] = s > 0 ? 1 : -1;
        }
        for (int k = 0; k < 6; ++k) {
            const EdgeKey key =
                sorted_key(tet.vertices[kTetEdges[k][0]], tet.vertices[kTetEdges[k][1]]);
            auto [it, inserted] = edge_ids.try_emplace(key, num_edges());
            if (inserted) {
                Edge edge;
                edge.vertices = key;
                edge.length = (vertex(key[0]) - vertex(key[1])).norm();
                edges_.push_back(edge);
            }
            tet.edges[k] = it->second;
        }
    }

    for (const Face& face : faces_) {
        if (!face.boundary())
            continue;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                edges_[edge_ids.at(sorted_key(face.vertices[a], face.vertices[b]))].boundary =
                    true;
    }
}

int Mesh::num_boundary_faces() const
{
    return static_cast<int>(
        std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.boundary(); }));
}

double Mesh::total_volume() const
{
    double v = 0.0;
    for (const Tet& t : tets_)
        v += t.volume;
    return v;
}

double Mesh::max_diameter() const
{
    double h = 0.0;
    for (const Tet& t : tets_)
        h = std::max(h, t.diameter);
    return h;
}

Vec3 Mesh::point(int t, std::span<const double, 4> bary) const
{
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < 4; ++i)
        x += bary[i] * vertex(tets_[t].vertices[i]);
    return x;
}

Vec3 Mesh::face_point(int f, std::span<const double, 3> bary) const
{
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        x += bary[i] * vertex(faces_[f].vertices[i]);
    return x;
}

int Mesh::local_face(int t, int f) const
{
    const auto& fs = tets_[t].faces;
    for (int i = 0; i < 4; ++i)
        if (fs[i] == f)
            return i;
    return -1;
}

Mesh build_cube_mesh(int n)
{
    if (n < 1)
        throw FemError("cube mesh needs n >= 1");
    return build_grid_mesh(Vec3::Zero(), {n, n, n}, 1.0 / n,
                           [](int, int, int) { return true; });
}

Mesh build_lshape_mesh(int n)
{
    if (n < 1)
        throw FemError("L-shape mesh needs n >= 1");
    // Cells with x >= 0 and z >= 0 lie inside the removed unit cube.
    return build_grid_mesh(Vec3(-1.0, 0.0, -1.0), {2 * n, n, 2 * n}, 1.0 / n,
                           [n](int i, int, int k) { return !(i >= n && k >= n); });
}

std::array<double, 4> barycentric(const Mesh& mesh, int t, const Vec3& x)
{
    const Tet& tet = mesh.tet(t);
    std::array<double, 4> b{};
    for (int i = 0; i < 4; ++i)
        b[i] = 0.25 + tet.grad_lambda[i].dot(x - tet.centroid);
    return b;
}

double inradius(const Mesh& mesh, int t)
{
    const Tet& tet = mesh.tet(t);
    double surface = 0.0;
    for (int f : tet.faces)
        surface += mesh.face(f).area;
    return 3.0 * tet.volume / surface;
}

void write_vtk(std::ostream& os, const Mesh& mesh, std::span<const CellField> fields)
{
    os << "# vtk DataFile Version 3.0\nncfem mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << std::setprecision(17);
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vec3& v : mesh.vertices())
        os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    os << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
    for (const Tet& t : mesh.tets())
        os << "4 " << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2] << ' '
           << t.vertices[3] << '\n';
    os << "CELL_TYPES " << mesh.num_tets() << '\n';
    for (int t = 0; t < mesh.num_tets(); ++t)
        os << "10\n";
    if (fields.empty())
        return;
    os << "CELL_DATA " << mesh.num_tets() << '\n';
    for (const CellField& field : fields) {
        if (field.values.size() != static_cast<std::size_t>(field.components * mesh.num_tets()))
            throw FemError("cell field '" + field.name + "' has the wrong size");
        if (field.components == 1)
            os << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
        else
            os << "FIELD FieldData 1\n"
               << field.name << ' ' << field.components << ' ' << mesh.num_tets()
               << " double\n";
        for (int t = 0; t < mesh.num_tets(); ++t) {
            for (int c = 0; c < field.components; ++c)
                os << (c ? " " : "") << field.values[t * field.components + c];
            os << '\n';
        }
    }
}

void write_vtk(const std::string& path, const Mesh& mesh, std::span<const CellField> fields)
{
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty())
        std::filesystem::create_directories(parent, ec);
    std::ofstream os(path);
    if (!os)
        throw FemError("cannot open " + path);
    write_vtk(os, mesh, fields);
}

}  // namespace ncfem
