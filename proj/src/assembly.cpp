#include "ncfem/assembly.hpp"

#include "ncfem/quadrature.hpp"

namespace ncfem {

namespace {

void require(bool ok, const char* what)
{
    if (!ok)
        throw FemError(what);
}

}  // namespace

SparseMatrix assemble_biharmonic(const Mesh& mesh, const DofMap& mwx,
                                 std::span<const MwxLocalBasis> bases)
{
    require(mwx.space() == Space::Mwx, "biharmonic assembly needs an MWX dof map");
    require(bases.size() == static_cast<std::size_t>(mesh.num_tets()),
            "one MWX basis per tet expected");
    std::vector<Triplet> triplets;
    triplets.reserve(100 * mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const std::vector<int> dofs = local_dofs(mesh, mwx, t);
        const double vol = mesh.tet(t).volume;
        for (int a = 0; a < MwxLocalBasis::kSize; ++a) {
            if (dofs[a] < 0)
                continue;
            for (int b = 0; b < MwxLocalBasis::kSize; ++b)
                if (dofs[b] >= 0)
                    triplets.emplace_back(dofs[a], dofs[b],
                                          vol * ddot(bases[t].hessian(a), bases[t].hessian(b)));
        }
    }
    return compress(std::move(triplets), mwx.size(), mwx.size());
}

Eigen::VectorXd assemble_load_scalar(const Mesh& mesh, const DofMap& mwx,
                                     std::span<const MwxLocalBasis> bases,
                                     const ScalarFunction& f, int degree)
{
    require(mwx.space() == Space::Mwx, "scalar load needs an MWX dof map");
    const TetRule& rule = tet_rule(degree);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mwx.size());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const std::vector<int> dofs = local_dofs(mesh, mwx, t);
        const double vol = mesh.tet(t).volume;
        MwxLocalBasis::Coeffs local = MwxLocalBasis::Coeffs::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 x = mesh.point(t, rule.points[q]);
            const Eigen::Matrix<double, 10, 1> m = bases[t].monomials(x);
            local += 6.0 * vol * rule.weights[q] * f(x) *
                     (bases[t].coefficients().transpose() * m);
        }
        for (int a = 0; a < MwxLocalBasis::kSize; ++a)
            if (dofs[a] >= 0)
                load[dofs[a]] += local[a];
    }
    return load;
}

SparseMatrix assemble_cr_stiffness(const Mesh& mesh, const DofMap& cr)
{
    std::vector<Triplet> triplets;
    triplets.reserve(16 * cr.components() * mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const CrLocalBasis basis = cr_local_basis(mesh, t);
        const Tet& tet = mesh.tet(t);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double k = tet.volume * basis.gradients[a].dot(basis.gradients[b]);
                for (int c = 0; c < cr.components(); ++c) {
                    const int ga = cr.index(tet.faces[a], c);
                    const int gb = cr.index(tet.faces[b], c);
                    if (ga >= 0 && gb >= 0)
                        triplets.emplace_back(ga, gb, k);
                }
            }
    }
    return compress(std::move(triplets), cr.size(), cr.size());
}

SparseMatrix assemble_jump_penalty(const Mesh& mesh, const DofMap& cr, int degree)
{
    const TriRule& rule = tri_rule(degree);
    std::vector<Triplet> triplets;
    triplets.reserve(64 * cr.components() * mesh.num_faces());

    struct Trace {
        int face;  // global face carrying the DoF
        double sign;
        std::vector<double> values;  // at quadrature points
    };
    std::vector<Trace> traces;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        traces.clear();
        for (int side = 0; side < 2; ++side) {
            const int t = face.tets[side];
            if (t < 0)
                continue;
            const Tet& tet = mesh.tet(t);
            const double sign = tet.face_signs[mesh.local_face(t, f)];
            for (int a = 0; a < 4; ++a) {
                Trace tr{tet.faces[a], sign, {}};
                for (std::size_t q = 0; q < rule.size(); ++q) {
                    const auto bary = barycentric(mesh, t, mesh.face_point(f, rule.points[q]));
                    tr.values.push_back(CrLocalBasis::value(a, bary));
                }
                traces.push_back(std::move(tr));
            }
        }
        const double scale = 2.0 * face.area / face.diameter;
        for (const Trace& u : traces)
            for (const Trace& v : traces) {
                double m = 0.0;
                for (std::size_t q = 0; q < rule.size(); ++q)
                    m += rule.weights[q] * u.values[q] * v.values[q];
                m *= scale * u.sign * v.sign;
                for (int c = 0; c < cr.components(); ++c) {
                    const int gu = cr.index(u.face, c);
                    const int gv = cr.index(v.face, c);
                    if (gu >= 0 && gv >= 0)
                        triplets.emplace_back(gu, gv, m);
                }
            }
    }
    return compress(std::move(triplets), cr.size(), cr.size());
}

SparseMatrix assemble_curl_block(const Mesh& mesh, const DofMap& cr_sym, const DofMap& p0)
{
    require(cr_sym.space() == Space::CrSym && p0.space() == Space::P0Traceless,
            "curl block needs CR-sym and P0 traceless dof maps");
    const auto& sbasis = sym_basis();
    const auto& tbasis = traceless_basis();
    std::vector<Triplet> triplets;
    triplets.reserve(4 * 6 * 8 * mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const CrLocalBasis basis = cr_local_basis(mesh, t);
        const Tet& tet = mesh.tet(t);
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 6; ++c) {
                const int col = cr_sym.index(tet.faces[a], c);
                if (col < 0)
                    continue;
                TensorGradient d;
                for (int k = 0; k < 3; ++k)
                    d[k] = basis.gradients[a][k] * sbasis[c];
                const Mat3 curl = row_curl(d);
                for (int m = 0; m < 8; ++m)
                    if (const int row = p0.index(t, m); row >= 0)
                        triplets.emplace_back(row, col, tet.volume * ddot(curl, tbasis[m]));
            }
    }
    return compress(std::move(triplets), p0.size(), cr_sym.size());
}

SparseMatrix assemble_devgrad_block(const Mesh& mesh, const DofMap& cr_vector, const DofMap& p0)
{
    require(cr_vector.space() == Space::CrVector && p0.space() == Space::P0Traceless,
            "dev grad block needs CR-vector and P0 traceless dof maps");
    std::vector<Triplet> triplets;
    triplets.reserve(4 * 3 * 8 * mesh.num_tets());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const CrLocalBasis basis = cr_local_basis(mesh, t);
        const Tet& tet = mesh.tet(t);
        for (int a = 0; a < 4; ++a)
            for (int d = 0; d < 3; ++d) {
                const int col = cr_vector.index(tet.faces[a], d);
                if (col < 0)
                    continue;
                Mat3 jac = Mat3::Zero();
                jac.row(d) = basis.gradients[a].transpose();
                const Tless3 dg = dev_grad(jac);
                for (int m = 0; m < 8; ++m)
                    if (const int row = p0.index(t, m); row >= 0)
                        triplets.emplace_back(row, col, tet.volume * dg.coeffs[m]);
            }
    }
    return compress(std::move(triplets), p0.size(), cr_vector.size());
}

Eigen::VectorXd p0_weights(const Mesh& mesh, const DofMap& p0)
{
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p0.size());
    for (int t = 0; t < mesh.num_tets(); ++t)
        for (int m = 0; m < p0.components(); ++m)
            if (const int g = p0.index(t, m); g >= 0)
                w[g] = mesh.tet(t).volume;
    return w;
}

Eigen::VectorXd assemble_sym_load(const Mesh& mesh, const DofMap& cr_sym,
                                  std::span<const Sym3> g_h)
{
    require(g_h.size() == static_cast<std::size_t>(mesh.num_tets()),
            "one constant g_h value per tet expected");
    Eigen::VectorXd load = Eigen::VectorXd::Zero(cr_sym.size());
    // Each CR basis function has mean 1/4 on its tet.
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const Tet& tet = mesh.tet(t);
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 6; ++c)
                if (const int g = cr_sym.index(tet.faces[a], c); g >= 0)
                    load[g] += 0.25 * tet.volume * g_h[t].coeffs[c];
    }
    return load;
}

StokesSystem assemble_stokes(const Mesh& mesh, const DofMap& cr_sym, const DofMap& cr_vector,
                             const DofMap& p0, std::span<const Sym3> g_h)
{
    require(cr_sym.num_entities() == mesh.num_faces() &&
                cr_vector.num_entities() == mesh.num_faces() &&
                p0.num_entities() == mesh.num_tets(),
            "dof maps do not belong to this mesh");

    StokesSystem sys;
    sys.num_sigma = cr_sym.size();
    sys.num_r = cr_vector.size();
    sys.num_p = p0.size();
    sys.stiffness = assemble_cr_stiffness(mesh, cr_sym);
    sys.penalty = assemble_jump_penalty(mesh, cr_vector);
    sys.curl = assemble_curl_block(mesh, cr_sym, p0);
    sys.devgrad = assemble_devgrad_block(mesh, cr_vector, p0);

    const int n = sys.num_sigma + sys.num_r;
    std::vector<Triplet> a, b;
    a.reserve(sys.stiffness.nonZeros() + sys.penalty.nonZeros());
    b.reserve(sys.curl.nonZeros() + sys.devgrad.nonZeros());
    for (int k = 0; k < sys.stiffness.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(sys.stiffness, k); it; ++it)
            a.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < sys.penalty.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(sys.penalty, k); it; ++it)
            a.emplace_back(sys.num_sigma + it.row(), sys.num_sigma + it.col(), it.value());
    for (int k = 0; k < sys.curl.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(sys.curl, k); it; ++it)
            b.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < sys.devgrad.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(sys.devgrad, k); it; ++it)
            b.emplace_back(it.row(), sys.num_sigma + it.col(), it.value());

    sys.saddle.primal = compress(std::move(a), n, n);
    sys.saddle.constraint = compress(std::move(b), sys.num_p, n);
    sys.saddle.weights = p0_weights(mesh, p0);
    sys.saddle.rhs_primal = Eigen::VectorXd::Zero(n);
    sys.saddle.rhs_primal.head(sys.num_sigma) = assemble_sym_load(mesh, cr_sym, g_h);
    sys.saddle.rhs_constraint = Eigen::VectorXd::Zero(sys.num_p);
    return sys;
}

Eigen::VectorXd assemble_hessian_load(const Mesh& mesh, const DofMap& mwx,
                                      std::span<const MwxLocalBasis> bases,
                                      const Eigen::VectorXd& w, const DofMap& cr_sym)
{
    const std::vector<Mat3> hess = mwx_broken_hessian(mesh, mwx, bases, w);
    std::vector<Sym3> g(hess.size());
    for (std::size_t t = 0; t < hess.size(); ++t)
        g[t] = sym(hess[t]);
    return assemble_sym_load(mesh, cr_sym, g);
}

Eigen::VectorXd assemble_sigma_load(const Mesh& mesh, const DofMap& cr_sym,
                                    const Eigen::VectorXd& sigma, const DofMap& mwx,
                                    std::span<const MwxLocalBasis> bases)
{
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mwx.size());
    for (int t = 0; t < mesh.num_tets(); ++t) {
        // σ_h is affine, so its mean is the average of the four face values.
        const Eigen::MatrixXd local = cr_local_values(mesh, cr_sym, sigma, t);
        Sym3 mean;
        mean.coeffs = 0.25 * local.colwise().sum().transpose();
        const Mat3 m = mean.matrix();
        const std::vector<int> dofs = local_dofs(mesh, mwx, t);
        for (int b = 0; b < MwxLocalBasis::kSize; ++b)
            if (dofs[b] >= 0)
                load[dofs[b]] += mesh.tet(t).volume * ddot(m, bases[t].hessian(b));
    }
    return load;
}

}  // namespace ncfem
