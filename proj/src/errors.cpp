#include "ncfem/errors.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "ncfem/quadrature.hpp"

namespace ncfem {

double cr_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const ComponentFunction& exact, int degree)
{
    const TetRule& rule = tet_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const Eigen::MatrixXd local = cr_local_values(mesh, map, coeffs, t);
        double st = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            st += rule.weights[q] *
                  (exact(mesh.point(t, rule.points[q])) - cr_value(local, rule.points[q]))
                      .squaredNorm();
        sum += 6.0 * mesh.tet(t).volume * st;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double cr_error_h1(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const ComponentGradient& exact_gradient, int degree)
{
    const TetRule& rule = tet_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const Eigen::MatrixXd grad =
            cr_gradient(cr_local_basis(mesh, t), cr_local_values(mesh, map, coeffs, t));
        double st = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            st += rule.weights[q] *
                  (exact_gradient(mesh.point(t, rule.points[q])) - grad).squaredNorm();
        sum += 6.0 * mesh.tet(t).volume * st;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double sym_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                    const TensorFunction& exact, int degree)
{
    return cr_error_l2(
        mesh, map, coeffs, [&](const Vec3& x) { return Eigen::VectorXd(sym(exact(x)).coeffs); },
        degree);
}

double sym_error_h1(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                    const TensorGradientFunction& exact_gradient, int degree)
{
    return cr_error_h1(
        mesh, map, coeffs,
        [&](const Vec3& x) {
            const auto d = exact_gradient(x);
            Eigen::MatrixXd g(6, 3);
            for (int k = 0; k < 3; ++k)
                g.col(k) = sym(d[k]).coeffs;
            return g;
        },
        degree);
}

double jump_seminorm(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                     int degree)
{
    const TriRule& rule = tri_rule(degree);
    double sum = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        double sf = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 x = mesh.face_point(f, rule.points[q]);
            Eigen::VectorXd jump = Eigen::VectorXd::Zero(map.components());
            for (int t : face.tets) {
                if (t < 0)
                    continue;
                const double sign = mesh.tet(t).face_signs[mesh.local_face(t, f)];
                jump += sign *
                        cr_value(cr_local_values(mesh, map, coeffs, t), barycentric(mesh, t, x));
            }
            sf += rule.weights[q] * jump.squaredNorm();
        }
        sum += 2.0 * face.area * sf / face.diameter;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double triple_norm(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs)
{
    double grad = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t)
        grad += mesh.tet(t).volume *
                cr_gradient(cr_local_basis(mesh, t), cr_local_values(mesh, map, coeffs, t))
                    .squaredNorm();
    const double jump = jump_seminorm(mesh, map, coeffs);
    return std::sqrt(grad + jump * jump);
}

double mwx_error_h1(const Mesh& mesh, const DofMap& map, std::span<const MwxLocalBasis> bases,
                    const Eigen::VectorXd& coeffs, const VectorFunction& exact_gradient,
                    int degree)
{
    const TetRule& rule = tet_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const MwxLocalBasis::Coeffs c = mwx_local_coeffs(mesh, map, coeffs, t);
        double st = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec3 x = mesh.point(t, rule.points[q]);
            st += rule.weights[q] * (exact_gradient(x) - bases[t].gradient(c, x)).squaredNorm();
        }
        sum += 6.0 * mesh.tet(t).volume * st;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double mwx_error_h2(const Mesh& mesh, const DofMap& map, std::span<const MwxLocalBasis> bases,
                    const Eigen::VectorXd& coeffs, const TensorFunction& exact_hessian,
                    int degree)
{
    const TetRule& rule = tet_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const Mat3 h = bases[t].hessian(mwx_local_coeffs(mesh, map, coeffs, t));
        double st = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            st += rule.weights[q] *
                  (exact_hessian(mesh.point(t, rule.points[q])) - h).squaredNorm();
        sum += 6.0 * mesh.tet(t).volume * st;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double p0_error_l2(const Mesh& mesh, const DofMap& map, const Eigen::VectorXd& coeffs,
                   const TensorFunction& exact, int degree)
{
    const TetRule& rule = tet_rule(degree);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        Tless3 ph;
        for (int m = 0; m < 8; ++m)
            if (const int g = map.index(t, m); g >= 0)
                ph.coeffs[m] = coeffs[g];
        double st = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            st += rule.weights[q] *
                  (dev(exact(mesh.point(t, rule.points[q]))).coeffs - ph.coeffs).squaredNorm();
        sum += 6.0 * mesh.tet(t).volume * st;
    }
    return std::sqrt(std::max(sum, 0.0));
}

double identity_residual(const Mesh& mesh, const DofMap& cr_sym, const Eigen::VectorXd& sigma,
                         const DofMap& cr_vector, const Eigen::VectorXd& r)
{
    const auto& sbasis = sym_basis();
    double sum = 0.0;
    for (int t = 0; t < mesh.num_tets(); ++t) {
        const CrLocalBasis basis = cr_local_basis(mesh, t);
        const Eigen::MatrixXd gs = cr_gradient(basis, cr_local_values(mesh, cr_sym, sigma, t));
        const Eigen::MatrixXd gr = cr_gradient(basis, cr_local_values(mesh, cr_vector, r, t));
        TensorGradient d;
        for (int k = 0; k < 3; ++k) {
            d[k] = Mat3::Zero();
            for (int c = 0; c < 6; ++c)
                d[k] += gs(c, k) * sbasis[c];
        }
        const Mat3 jac = gr;
        const Mat3 q = row_curl(d) + dev_grad(jac).matrix();
        sum += mesh.tet(t).volume * q.squaredNorm();
    }
    return std::sqrt(sum);
}

std::vector<std::optional<double>> eoc(std::span<const double> h, std::span<const double> errors)
{
    if (h.size() != errors.size())
        throw FemError("eoc needs one mesh size per error");
    std::vector<std::optional<double>> rates(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        if (!(errors[k] > 0 && errors[k - 1] > 0) || h[k] == h[k - 1])
            continue;
        rates[k] = std::log(errors[k - 1] / errors[k]) / std::log(h[k - 1] / h[k]);
    }
    return rates;
}

// Reports ------------------------------------------------------------------------

const ErrorColumn& ErrorReport::column(const std::string& key) const
{
    for (const ErrorColumn& c : columns)
        if (c.key == key)
            return c;
    throw FemError("error report has no column '" + key + "'");
}

std::vector<std::optional<double>> ErrorReport::rates(const std::string& key) const
{
    return eoc(h, column(key).values);
}

std::optional<double> ErrorReport::last_rate(const std::string& key) const
{
    const auto r = rates(key);
    if (r.empty())
        return std::nullopt;
    return r.back();
}

namespace {

std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string h_label(double h)
{
    const double k = std::log2(1.0 / h);
    if (std::abs(k - std::round(k)) < 1e-12)
        return "2^-" + std::to_string(static_cast<int>(std::round(k)));
    return fmt("%.6g", h);
}

}  // namespace

void write_csv(std::ostream& os, const ErrorReport& report)
{
    os << "level,h";
    for (const ErrorColumn& c : report.columns)
        os << ',' << c.key << (c.with_rate ? ",rate" : "");
    os << '\n';
    std::vector<std::vector<std::optional<double>>> rates;
    for (const ErrorColumn& c : report.columns)
        rates.push_back(eoc(report.h, c.values));
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        os << report.levels[k] << ',' << fmt("%.10g", report.h[k]);
        for (std::size_t c = 0; c < report.columns.size(); ++c) {
            os << ',' << fmt("%.9e", report.columns[c].values[k]);
            if (report.columns[c].with_rate) {
                os << ',';
                if (rates[c][k])
                    os << fmt("%.4f", *rates[c][k]);
            }
        }
        os << '\n';
    }
}

void write_markdown(std::ostream& os, const ErrorReport& report)
{
    // Labels such as |u−u_h|_{1,h} must not split the row.
    auto escape = [](const std::string& s) {
        std::string out;
        for (char ch : s) {
            if (ch == '|')
                out += '\\';
            out += ch;
        }
        return out;
    };
    std::vector<std::string> header{"h"};
    for (const ErrorColumn& c : report.columns) {
        header.push_back(escape(c.label));
        if (c.with_rate)
            header.push_back("rate");
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::optional<double>>> rates;
    for (const ErrorColumn& c : report.columns)
        rates.push_back(eoc(report.h, c.values));
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        std::vector<std::string> row{h_label(report.h[k])};
        for (std::size_t c = 0; c < report.columns.size(); ++c) {
            row.push_back(fmt("%.6f", report.columns[c].values[k]));
            if (report.columns[c].with_rate)
                row.push_back(rates[c][k] ? fmt("%.4f", *rates[c][k]) : std::string("-"));
        }
        rows.push_back(std::move(row));
    }

    // Width by code points so the unicode labels line up.
    auto width = [](const std::string& s) {
        std::size_t n = 0;
        for (unsigned char ch : s)
            n += (ch & 0xC0) != 0x80;
        return n;
    };
    std::vector<std::size_t> w(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        w[i] = width(header[i]);
        for (const auto& row : rows)
            w[i] = std::max(w[i], width(row[i]));
    }
    auto emit = [&](const std::vector<std::string>& cells) {
        os << '|';
        for (std::size_t i = 0; i < cells.size(); ++i)
            os << ' ' << cells[i] << std::string(w[i] - width(cells[i]), ' ') << " |";
        os << '\n';
    };
    if (!report.title.empty())
        os << "**" << report.title << "**\n\n";
    emit(header);
    os << '|';
    for (std::size_t i = 0; i < header.size(); ++i)
        os << std::string(w[i] + 2, '-') << '|';
    os << '\n';
    for (const auto& row : rows)
        emit(row);
}

}  // namespace ncfem
