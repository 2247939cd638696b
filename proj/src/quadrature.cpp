#include "ncfem/quadrature.hpp"

#include <cmath>
#include <string>

#include "ncfem/mesh.hpp"

namespace ncfem {

namespace {

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

// Calls visit(beta) for every beta in N^(Dim+1) with |beta| == total.
template <int Dim, class Visit>
void for_each_composition(int total, Visit&& visit)
{
    std::array<int, Dim + 1> beta{};
    auto recurse = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == Dim) {
            beta[slot] = remaining;
            visit(beta);
            return;
        }
        for (int b = remaining; b >= 0; --b) {
            beta[slot] = b;
            self(self, slot + 1, remaining - b);
        }
    };
    recurse(recurse, 0, total);
}

template <int Dim>
const SimplexRule<Dim>& cached_rule(int degree)
{
    if (degree < 0 || degree > kMaxQuadratureDegree)
        throw FemError("unsupported quadrature degree " + std::to_string(degree));
    static const auto rules = [] {
        std::array<SimplexRule<Dim>, kMaxQuadratureDegree + 1> r;
        for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
            r[d] = grundmann_moller<Dim>(d <= 1 ? 0 : (d) / 2);
            r[d].degree = d;
        }
        return r;
    }();
    return rules[degree];
}

}  // namespace

template <int Dim>
SimplexRule<Dim> grundmann_moller(int s)
{
    constexpr int n = Dim;
    const int d = 2 * s + 1;
    SimplexRule<Dim> rule;
    rule.degree = d;
    for (int i = 0; i <= s; ++i) {
        const double denom = d + n - 2 * i;
        const double weight = (i % 2 ? -1.0 : 1.0) * std::pow(2.0, -2 * s) * std::pow(denom, d) /
                              (factorial(i) * factorial(d + n - i));
        for_each_composition<Dim>(s - i, [&](const std::array<int, Dim + 1>& beta) {
            std::array<double, Dim + 1> p{};
            for (int k = 0; k <= n; ++k)
                p[k] = (2.0 * beta[k] + 1.0) / denom;
            rule.points.push_back(p);
            rule.weights.push_back(weight);
        });
    }
    return rule;
}

template SimplexRule<1> grundmann_moller<1>(int);
template SimplexRule<2> grundmann_moller<2>(int);
template SimplexRule<3> grundmann_moller<3>(int);

const TetRule& tet_rule(int degree) { return cached_rule<3>(degree); }
const TriRule& tri_rule(int degree) { return cached_rule<2>(degree); }
const LineRule& line_rule(int degree) { return cached_rule<1>(degree); }

}  // namespace ncfem
