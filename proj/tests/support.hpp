#pragma once

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "ncfem/mesh.hpp"

namespace ncfem::testing {

/// Polynomial in x1, x2, x3 with exact differentiation, used as an oracle.
class Poly {
public:
    using Exponent = std::array<int, 3>;

    Poly() = default;
    static Poly constant(double c) { return monomial(c, {0, 0, 0}); }
    static Poly monomial(double c, Exponent e)
    {
        Poly p;
        if (c != 0.0)
            p.terms_[e] = c;
        return p;
    }

    double operator()(const Vec3& x) const
    {
        double s = 0.0;
        for (const auto& [e, c] : terms_)
            s += c * std::pow(x[0], e[0]) * std::pow(x[1], e[1]) * std::pow(x[2], e[2]);
        return s;
    }

    Poly d(int k) const
    {
        Poly p;
        for (const auto& [key, c] : terms_) {
            if (key[k] == 0)
                continue;
            auto e = key;
            --e[k];
            p.terms_[e] += c * key[k];
        }
        return p;
    }

    Poly operator+(const Poly& o) const
    {
        Poly p = *this;
        for (const auto& [e, c] : o.terms_)
            p.terms_[e] += c;
        return p;
    }
    Poly operator*(double s) const
    {
        Poly p = *this;
        for (auto& [e, c] : p.terms_)
            c *= s;
        return p;
    }

    Vec3 gradient(const Vec3& x) const { return {d(0)(x), d(1)(x), d(2)(x)}; }
    Mat3 hessian(const Vec3& x) const
    {
        Mat3 h;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                h(i, j) = d(i).d(j)(x);
        return h;
    }

    int degree() const
    {
        int deg = 0;
        for (const auto& [e, c] : terms_)
            deg = std::max(deg, e[0] + e[1] + e[2]);
        return deg;
    }

private:
    std::map<Exponent, double> terms_;
};

/// Random polynomial of total degree <= deg with coefficients in [-1, 1].
inline Poly random_poly(std::mt19937& rng, int deg)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly p;
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            for (int c = 0; a + b + c <= deg; ++c)
                p = p + Poly::monomial(u(rng), {a, b, c});
    return p;
}

/// Matrix of polynomials τ_il.
using PolyMat = std::array<std::array<Poly, 3>, 3>;

inline PolyMat random_poly_mat(std::mt19937& rng, int deg)
{
    PolyMat m;
    for (auto& row : m)
        for (auto& p : row)
            p = random_poly(rng, deg);
    return m;
}

inline Mat3 eval(const PolyMat& m, const Vec3& x)
{
    Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            a(i, j) = m[i][j](x);
    return a;
}

/// d[k](i, l) = ∂_k τ_il at x.
inline std::array<Mat3, 3> eval_gradient(const PolyMat& m, const Vec3& x)
{
    std::array<Mat3, 3> d;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l)
                d[k](i, l) = m[i][l].d(k)(x);
    return d;
}

/// Single positively oriented tet with vertices near the unit simplex; the
/// inradius stays bounded away from zero.
inline Mesh random_tet_mesh(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (;;) {
        std::vector<Vec3> v{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
        const Vec3 shift(3.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng));
        for (Vec3& p : v)
            p = p + Vec3(u(rng), u(rng), u(rng)) + shift;
        Mat3 m;
        m << v[1] - v[0], v[2] - v[0], v[3] - v[0];
        if (m.determinant() < 0)
            std::swap(v[2], v[3]);
        if (std::abs(m.determinant()) < 0.05)
            continue;
        return Mesh(v, {{0, 1, 2, 3}});
    }
}

inline Mesh reference_tet_mesh()
{
    return Mesh({Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}, {{0, 1, 2, 3}});
}

}  // namespace ncfem::testing
