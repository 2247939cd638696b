#include "ncfem/tensor.hpp"

#include <cmath>

namespace ncfem {

namespace {

Mat3 unit(int i, int j)
{
    Mat3 m = Mat3::Zero();
    m(i, j) = 1.0;
    return m;
}

constexpr int levi_civita(int i, int j, int k)
{
    return (i - j) * (j - k) * (k - i) / 2;
}

}  // namespace

const std::array<Mat3, 6>& sym_basis()
{
    static const std::array<Mat3, 6> basis = [] {
        const double r = 1.0 / std::sqrt(2.0);
        return std::array<Mat3, 6>{unit(0, 0),
                                   unit(1, 1),
                                   unit(2, 2),
                                   r * (unit(0, 1) + unit(1, 0)),
                                   r * (unit(0, 2) + unit(2, 0)),
                                   r * (unit(1, 2) + unit(2, 1))};
    }();
    return basis;
}

const std::array<Mat3, 8>& traceless_basis()
{
    static const std::array<Mat3, 8> basis = [] {
        return std::array<Mat3, 8>{unit(0, 1),
                                   unit(0, 2),
                                   unit(1, 0),
                                   unit(1, 2),
                                   unit(2, 0),
                                   unit(2, 1),
                                   (unit(0, 0) - unit(1, 1)) / std::sqrt(2.0),
                                   (unit(0, 0) + unit(1, 1) - 2.0 * unit(2, 2)) / std::sqrt(6.0)};
    }();
    return basis;
}

Sym3 Sym3::from_matrix(const Mat3& m)
{
    Sym3 s;
    const auto& basis = sym_basis();
    for (int c = 0; c < 6; ++c)
        s.coeffs[c] = ddot(basis[c], m);
    return s;
}

Mat3 Sym3::matrix() const
{
    Mat3 m = Mat3::Zero();
    const auto& basis = sym_basis();
    for (int c = 0; c < 6; ++c)
        m += coeffs[c] * basis[c];
    return m;
}

Tless3 Tless3::from_matrix(const Mat3& m)
{
    Tless3 s;
    const auto& basis = traceless_basis();
    for (int c = 0; c < 8; ++c)
        s.coeffs[c] = ddot(basis[c], m);
    return s;
}

Mat3 Tless3::matrix() const
{
    Mat3 m = Mat3::Zero();
    const auto& basis = traceless_basis();
    for (int c = 0; c < 8; ++c)
        m += coeffs[c] * basis[c];
    return m;
}

double trace(const Mat3& a) { return a.trace(); }

Tless3 dev(const Mat3& a) { return Tless3::from_matrix(a); }

Sym3 sym(const Mat3& a) { return Sym3::from_matrix(a); }

Vec3 vskw(const Mat3& a)
{
    return 0.5 * Vec3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

Mat3 row_curl(const TensorGradient& d)
{
    Mat3 c = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    if (const int e = levi_civita(j, k, l))
                        c(i, j) += e * d[k](i, l);
    return c;
}

Vec3 row_div(const TensorGradient& d)
{
    Vec3 v = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l)
            v[i] += d[l](i, l);
    return v;
}

Tless3 dev_grad(const Mat3& jacobian) { return dev(jacobian); }

}  // namespace ncfem
