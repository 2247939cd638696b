#include "ncfem/elements.hpp"

#include <cmath>
#include <string>

#include "ncfem/quadrature.hpp"

namespace ncfem {

int components(Space space)
{
    switch (space) {
    case Space::CrScalar:
    case Space::Mwx:
        return 1;
    case Space::CrVector:
        return 3;
    case Space::CrSym:
        return 6;
    case Space::P0Traceless:
        return 8;
    }
    return 0;
}

DofMap::DofMap(Space space, int num_entities, std::vector<int> indices, int size)
    : space_(space)
    , components_(ncfem::components(space))
    , num_entities_(num_entities)
    , size_(size)
    , indices_(std::move(indices))
{
    if (indices_.size() != static_cast<std::size_t>(num_entities_ * components_))
        throw FemError("dof map index table has the wrong size");
}

int DofMap::num_constrained() const
{
    int n = 0;
    for (int i : indices_)
        n += i < 0;
    return n;
}

DofMap build_dofmap(const Mesh& mesh, Space space, BoundaryPolicy policy)
{
    const bool clamp = policy == BoundaryPolicy::Clamped ||
                       (policy == BoundaryPolicy::Default &&
                        (space == Space::CrSym || space == Space::Mwx));
    const int ncomp = components(space);

    std::vector<bool> on_boundary;
    switch (space) {
    case Space::CrScalar:
    case Space::CrVector:
    case Space::CrSym:
        for (const Face& f : mesh.faces())
            on_boundary.push_back(f.boundary());
        break;
    case Space::P0Traceless:
        on_boundary.assign(mesh.num_tets(), false);
        break;
    case Space::Mwx:
        for (const Face& f : mesh.faces())
            on_boundary.push_back(f.boundary());
        for (const Edge& e : mesh.edges())
            on_boundary.push_back(e.boundary);
        break;
    }

    const int num_entities = static_cast<int>(on_boundary.size());
    std::vector<int> indices(num_entities * ncomp, -1);
    int next = 0;
    for (int e = 0; e < num_entities; ++e) {
        if (clamp && on_boundary[e])
            continue;
        for (int c = 0; c < ncomp; ++c)
            indices[e * ncomp + c] = next++;
    }
    return DofMap(space, num_entities, std::move(indices), next);
}

std::vector<int> local_dofs(const Mesh& mesh, const DofMap& map, int t)
{
    const Tet& tet = mesh.tet(t);
    std::vector<int> dofs;
    switch (map.space()) {
    case Space::CrScalar:
    case Space::CrVector:
    case Space::CrSym:
        for (int f : tet.faces)
            for (int c = 0; c < map.components(); ++c)
                dofs.push_back(map.index(f, c));
        break;
    case Space::P0Traceless:
        for (int c = 0; c < map.components(); ++c)
            dofs.push_back(map.index(t, c));
        break;
    case Space::Mwx:
        for (int f : tet.faces)
            dofs.push_back(map.index(f));
        for (int e : tet.edges)
            dofs.push_back(map.index(mesh.num_faces() + e));
        break;
    }
    return dofs;
}

CrLocalBasis cr_local_basis(const Mesh& mesh, int t)
{
    const Tet& tet = mesh.tet(t);
    if (!(tet.volume > 1e-14 * std::pow(tet.diameter, 3)))
        throw FemError("degenerate tet " + std::to_string(t));
    CrLocalBasis basis;
    for (int i = 0; i < 4; ++i)
        basis.gradients[i] = -3.0 * tet.grad_lambda[i];
    return basis;
}

// MWX -------------------------------------------------------------------------

MwxLocalBasis::MwxLocalBasis(const Vec3& center, double scale, const Matrix& coeffs)
    : center_(center)
    , scale_(scale)
    , coeffs_(coeffs)
{
    const auto mh = monomial_hessians();
    for (int b = 0; b < kSize; ++b) {
        hessians_[b] = Mat3::Zero();
        for (int j = 0; j < kSize; ++j)
            hessians_[b] += coeffs_(j, b) * mh[j];
    }
}

MwxLocalBasis::Coeffs MwxLocalBasis::monomials(const Vec3& x) const
{
    const Vec3 xi = (x - center_) / scale_;
    Coeffs m;
    m << 1.0, xi[0], xi[1], xi[2], xi[0] * xi[0], xi[1] * xi[1], xi[2] * xi[2], xi[0] * xi[1],
        xi[0] * xi[2], xi[1] * xi[2];
    return m;
}

Eigen::Matrix<double, MwxLocalBasis::kSize, 3> MwxLocalBasis::monomial_gradients(
    const Vec3& x) const
{
    const Vec3 xi = (x - center_) / scale_;
    Eigen::Matrix<double, kSize, 3> g = Eigen::Matrix<double, kSize, 3>::Zero();
    for (int k = 0; k < 3; ++k) {
        g(1 + k, k) = 1.0;
        g(4 + k, k) = 2.0 * xi[k];
    }
    g(7, 0) = xi[1];
    g(7, 1) = xi[0];
    g(8, 0) = xi[2];
    g(8, 2) = xi[0];
    g(9, 1) = xi[2];
    g(9, 2) = xi[1];
    return g / scale_;
}

std::array<Mat3, MwxLocalBasis::kSize> MwxLocalBasis::monomial_hessians() const
{
    std::array<Mat3, kSize> h;
    h.fill(Mat3::Zero());
    for (int k = 0; k < 3; ++k)
        h[4 + k](k, k) = 2.0;
    h[7](0, 1) = h[7](1, 0) = 1.0;
    h[8](0, 2) = h[8](2, 0) = 1.0;
    h[9](1, 2) = h[9](2, 1) = 1.0;
    for (Mat3& m : h)
        m /= scale_ * scale_;
    return h;
}

double MwxLocalBasis::value(int b, const Vec3& x) const
{
    return coeffs_.col(b).dot(monomials(x));
}

Vec3 MwxLocalBasis::gradient(int b, const Vec3& x) const
{
    return monomial_gradients(x).transpose() * coeffs_.col(b);
}

double MwxLocalBasis::value(const Coeffs& c, const Vec3& x) const
{
    return (coeffs_ * c).dot(monomials(x));
}

Vec3 MwxLocalBasis::gradient(const Coeffs& c, const Vec3& x) const
{
    return monomial_gradients(x).transpose() * (coeffs_ * c);
}

Mat3 MwxLocalBasis::hessian(const Coeffs& c) const
{
    Mat3 h = Mat3::Zero();
    for (int b = 0; b < kSize; ++b)
        h += c[b] * hessians_[b];
    return h;
}

MwxLocalBasis::Matrix mwx_dof_matrix(const Mesh& mesh, int t, const Vec3& center, double scale)
{
    const Tet& tet = mesh.tet(t);
    const MwxLocalBasis probe(center, scale, MwxLocalBasis::Matrix::Identity());
    MwxLocalBasis::Matrix d;
    // ∇m is affine, so the face integral is |F| times its centroid value.
    for (int i = 0; i < 4; ++i) {
        const Face& face = mesh.face(tet.faces[i]);
        d.row(i) = face.area * (probe.monomial_gradients(face.centroid) * face.normal).transpose();
    }
    // Simpson's rule is exact for quadratics on a segment.
    for (int k = 0; k < 6; ++k) {
        const Vec3& a = mesh.vertex(tet.vertices[kTetEdges[k][0]]);
        const Vec3& b = mesh.vertex(tet.vertices[kTetEdges[k][1]]);
        const double len = (b - a).norm();
        d.row(4 + k) = (len / 6.0 *
                        (probe.monomials(a) + 4.0 * probe.monomials(0.5 * (a + b)) +
                         probe.monomials(b)))
                           .transpose();
    }
    return d;
}

MwxLocalBasis mwx_local_basis(const Mesh& mesh, int t, double max_condition)
{
    const Tet& tet = mesh.tet(t);
    const MwxLocalBasis::Matrix d = mwx_dof_matrix(mesh, t, tet.centroid, tet.diameter);
    const Eigen::JacobiSVD<MwxLocalBasis::Matrix> svd(d);
    const auto& sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (!(cond <= max_condition))
        throw FemError("MWX DoF matrix on tet " + std::to_string(t) +
                       " is ill-conditioned (cond = " + std::to_string(cond) + ")");
    return MwxLocalBasis(tet.centroid, tet.diameter, d.partialPivLu().inverse());
}

std::vector<MwxLocalBasis> mwx_local_bases(const Mesh& mesh)
{
    std::vector<MwxLocalBasis> bases;
    bases.reserve(mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t)
        bases.push_back(mwx_local_basis(mesh, t));
    return bases;
}

// Interpolation ------------------------------------------------------------------

Eigen::VectorXd interpolate_cr_components(const Mesh& mesh, const DofMap& map,
                                          const std::function<Eigen::VectorXd(const Vec3&)>& f,
                                          int degree)
{
    const TriRule& rule = tri_rule(degree);
    const int ncomp = map.components();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(map.size());
    for (int fi = 0; fi < mesh.num_faces(); ++fi) {
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(ncomp);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Eigen::VectorXd v = f(mesh.face_point(fi, rule.points[q]));
            if (v.size() != ncomp)
                throw FemError("interpolated function has the wrong number of components");
            avg += 2.0 * rule.weights[q] * v;
        }
        for (int c = 0; c < ncomp; ++c)
            if (const int g = map.index(fi, c); g >= 0)
                out[g] = avg[c];
    }
    return out;
}

Eigen::VectorXd interpolate_cr(const Mesh& mesh, const DofMap& map, const ScalarFunction& f,
                               int degree)
{
    return interpolate_cr_components(
        mesh, map, [&](const Vec3& x) { return Eigen::VectorXd::Constant(1, f(x)); }, degree);
}

Eigen::VectorXd interpolate_cr_vector(const Mesh& mesh, const DofMap& map,
                                      const VectorFunction& f, int degree)
{
    return interpolate_cr_components(
        mesh, map, [&](const Vec3& x) { return Eigen::VectorXd(f(x)); }, degree);
}

Eigen::VectorXd interpolate_cr_sym(const Mesh& mesh, const DofMap& map, const TensorFunction& f,
                                   int degree)
{
    return interpolate_cr_components(
        mesh, map, [&](const Vec3& x) { return Eigen::VectorXd(sym(f(x)).coeffs); }, degree);
}

Eigen::VectorXd interpolate_mwx(const Mesh& mesh, const DofMap& map, const ScalarFunction& value,
                                const VectorFunction& gradient, int degree)
{
    if (map.space() != Space::Mwx)
        throw FemError("interpolate_mwx needs an MWX dof map");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(map.size());
    const TriRule& tri = tri_rule(degree);
    for (int fi = 0; fi < mesh.num_faces(); ++fi) {
        const int g = map.index(fi);
        if (g < 0)
            continue;
        const Face& face = mesh.face(fi);
        double s = 0.0;
        for (std::size_t q = 0; q < tri.size(); ++q)
            s += tri.weights[q] * gradient(mesh.face_point(fi, tri.points[q])).dot(face.normal);
        out[g] = 2.0 * face.area * s;
    }
    const LineRule& line = line_rule(degree);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const int g = map.index(mesh.num_faces() + e);
        if (g < 0)
            continue;
        const Edge& edge = mesh.edge(e);
        const Vec3& a = mesh.vertex(edge.vertices[0]);
        const Vec3& b = mesh.vertex(edge.vertices[1]);
        double s = 0.0;
        for (std::size_t q = 0; q < line.size(); ++q)
            s += line.weights[q] * value(line.points[q][0] * a + line.points[q][1] * b);
        out[g] = edge.length * s;
    }
    return out;
}

Eigen::VectorXd project_p0_traceless(const Mesh& mesh, const DofMap& map,
                                     const TensorFunction& f, int degree)
{
    if (map.space() != Space::P0Traceless)
        throw FemError("project_p0_traceless needs a P0 traceless dof map");
    const TetRule& rule = tet_rule(degree);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(map.size());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        Mat3 mean = Mat3::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q)
            mean += 6.0 * rule.weights[q] * f(mesh.point(t, rule.points[q]));
        const Tless3 d = dev(mean);
        for (int c = 0; c < 8; ++c)
            if (const int g = map.index(t, c); g >= 0)
                out[g] = d.coeffs[c];
    }
    return out;
}

// Local field access -----------------------------------------------------------

Eigen::MatrixXd cr_local_values(const Mesh& mesh, const DofMap& map,
                                const Eigen::VectorXd& coeffs, int t)
{
    const Tet& tet = mesh.tet(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(4, map.components());
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < map.components(); ++c)
            if (const int g = map.index(tet.faces[i], c); g >= 0)
                local(i, c) = coeffs[g];
    return local;
}

Eigen::VectorXd cr_value(const Eigen::MatrixXd& local, std::span<const double, 4> bary)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(local.cols());
    for (int i = 0; i < 4; ++i)
        v += CrLocalBasis::value(i, bary) * local.row(i).transpose();
    return v;
}

Eigen::MatrixXd cr_gradient(const CrLocalBasis& basis, const Eigen::MatrixXd& local)
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(local.cols(), 3);
    for (int i = 0; i < 4; ++i)
        g += local.row(i).transpose() * basis.gradients[i].transpose();
    return g;
}

MwxLocalBasis::Coeffs mwx_local_coeffs(const Mesh& mesh, const DofMap& map,
                                       const Eigen::VectorXd& coeffs, int t)
{
    const std::vector<int> dofs = local_dofs(mesh, map, t);
    MwxLocalBasis::Coeffs c = MwxLocalBasis::Coeffs::Zero();
    for (int a = 0; a < MwxLocalBasis::kSize; ++a)
        if (dofs[a] >= 0)
            c[a] = coeffs[dofs[a]];
    return c;
}

std::vector<Mat3> mwx_broken_hessian(const Mesh& mesh, const DofMap& map,
                                     std::span<const MwxLocalBasis> bases,
                                     const Eigen::VectorXd& coeffs)
{
    std::vector<Mat3> h(mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t)
        h[t] = bases[t].hessian(mwx_local_coeffs(mesh, map, coeffs, t));
    return h;
}

}  // namespace ncfem
