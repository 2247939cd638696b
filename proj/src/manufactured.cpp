#include "ncfem/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace ncfem {

namespace {

// d^m/dθ^m sin θ = sin(θ + mπ/2), evaluated without phase round-off.
double sin_derivative(double theta, int m)
{
    switch (m % 4) {
    case 0:
        return std::sin(theta);
    case 1:
        return std::cos(theta);
    case 2:
        return -std::sin(theta);
    default:
        return -std::cos(theta);
    }
}

}  // namespace

double sin_cubed_derivative(double t, int m)
{
    constexpr double pi = std::numbers::pi;
    return 0.25 * (3.0 * std::pow(pi, m) * sin_derivative(pi * t, m) -
                   std::pow(3.0 * pi, m) * sin_derivative(3.0 * pi * t, m));
}

double SineCubed::derivative(const Vec3& x, const std::array<int, 3>& alpha) const
{
    return amplitude_ * sin_cubed_derivative(x[0], alpha[0]) *
           sin_cubed_derivative(x[1], alpha[1]) * sin_cubed_derivative(x[2], alpha[2]);
}

double SineCubed::value(const Vec3& x) const { return derivative(x, {0, 0, 0}); }

Vec3 SineCubed::gradient(const Vec3& x) const
{
    return {derivative(x, {1, 0, 0}), derivative(x, {0, 1, 0}), derivative(x, {0, 0, 1})};
}

Mat3 SineCubed::hessian(const Vec3& x) const
{
    Mat3 h;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            std::array<int, 3> a{};
            ++a[i];
            ++a[j];
            h(i, j) = h(j, i) = derivative(x, a);
        }
    return h;
}

std::array<Mat3, 3> SineCubed::third(const Vec3& x) const
{
    std::array<Mat3, 3> d;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                std::array<int, 3> a{};
                ++a[i];
                ++a[j];
                ++a[k];
                d[k](i, j) = derivative(x, a);
            }
    return d;
}

double SineCubed::forcing(const Vec3& x) const
{
    // Δ³ = Σ_{a+b+c=3} 3!/(a!b!c!) ∂x^{2a} ∂y^{2b} ∂z^{2c}.
    static constexpr int fact[] = {1, 1, 2, 6};
    double lap3 = 0.0;
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) {
            const int c = 3 - a - b;
            lap3 += 6.0 / (fact[a] * fact[b] * fact[c]) * derivative(x, {2 * a, 2 * b, 2 * c});
        }
    return -lap3;
}

Mat3 SineCubed::stokes_load(const Vec3& x) const
{
    Mat3 g;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                std::array<int, 3> a{};
                ++a[i];
                ++a[j];
                a[k] += 2;
                s += derivative(x, a);
            }
            g(i, j) = g(j, i) = -s;
        }
    return g;
}

}  // namespace ncfem
