#include "emapr/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace emapr {

ConservedQuantities conserved_quantities(const ReconstructionOperators& ops, const Eigen::VectorXd& u, double alpha,
                                         bool reconstructed) {
    ConservedQuantities out;
    CellTabulation tab(ops, quadrature_rule(kAssemblyDegree));
    double mass = 0.0, stab = 0.0;
    for (int c = 0; c < ops.mesh().num_cells(); ++c) {
        tab.reinit(c);
        for (int q = 0; q < tab.num_points(); ++q) {
            const FieldAtPoint f = tab.field(q, u);
            const Vec2 w = reconstructed ? f.pi() : f.value;
            const Vec2& x = tab.point(q);
            const double jxw = tab.JxW(q);
            mass += jxw * w.squaredNorm();
            stab += jxw * f.piR.squaredNorm();
            out.M += jxw * w;
            out.M_x += jxw * (w.x() * x.y() - w.y() * x.x());
        }
    }
    out.E = 0.5 * mass;
    out.E_d = reconstructed ? 0.5 * (mass + alpha * stab) : out.E;
    return out;
}

ConservedQuantities field_quantities(const Mesh& mesh, const VectorField& w, int subdivisions, int degree) {
    if (subdivisions < 1) throw std::invalid_argument("field_quantities: subdivisions must be >= 1");
    const QuadratureRule& rule = quadrature_rule(degree);
    const int k = subdivisions;
    ConservedQuantities out;
    double mass = 0.0;
    auto integrate_triangle = [&](const Vec2& a, const Vec2& b, const Vec2& c) {
        const double area = 0.5 * std::abs((b - a).x() * (c - a).y() - (c - a).x() * (b - a).y());
        for (int q = 0; q < rule.size(); ++q) {
            const Bary& l = rule.points[q];
            const Vec2 x = l[0] * a + l[1] * b + l[2] * c;
            const Vec2 v = w(x);
            const double jxw = rule.weights[q] * area;
            mass += jxw * v.squaredNorm();
            out.M += jxw * v;
            out.M_x += jxw * (v.x() * x.y() - v.y() * x.x());
        }
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        const Vec2 e1 = (g.vertices[1] - g.vertices[0]) / k;
        const Vec2 e2 = (g.vertices[2] - g.vertices[0]) / k;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; i + j < k; ++j) {
                const Vec2 p = g.vertices[0] + i * e1 + j * e2;
                integrate_triangle(p, p + e1, p + e2);
                if (i + j + 1 < k) integrate_triangle(p + e1, p + e1 + e2, p + e2);
            }
        }
    }
    out.E = 0.5 * mass;
    out.E_d = out.E;
    return out;
}

ErrorBundle error_norms(const ReconstructionOperators& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                        const ExactSolution& exact, double t, double p_time, int degree) {
    const Spaces& s = ops.spaces();
    const QuadratureRule& rule = quadrature_rule(degree);
    CellTabulation tab(ops, rule);
    double l2 = 0.0, l2pi = 0.0, h1 = 0.0;
    for (int c = 0; c < ops.mesh().num_cells(); ++c) {
        tab.reinit(c);
        for (int q = 0; q < tab.num_points(); ++q) {
            const FieldAtPoint f = tab.field(q, u);
            const Vec2& x = tab.point(q);
            const Vec2 ue = exact.u(t, x);
            const double jxw = tab.JxW(q);
            l2 += jxw * (ue - f.value).squaredNorm();
            l2pi += jxw * (ue - f.pi()).squaredNorm();
            if (exact.grad_u) h1 += jxw * (exact.grad_u(t, x) - f.grad).squaredNorm();
        }
    }
    ErrorBundle out;
    out.L2_u = std::sqrt(l2);
    out.L2_Pu = std::sqrt(l2pi);
    if (exact.grad_u) out.H1_u = std::sqrt(h1);
    if (!exact.p || p.size() != s.pressure.size()) return out;

    const Mesh& m = ops.mesh();
    const Eigen::VectorXd php = l2_project_divergence(
        s, CellScalarField([&](int c, const Bary& l) { return exact.p(p_time, m.geometry(c).map(l)); }), degree);
    double lp = 0.0, lphp = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry& geo = m.geometry(c);
        for (int q = 0; q < rule.size(); ++q) {
            const Bary& l = rule.points[q];
            const double jxw = rule.weights[q] * geo.area();
            const double ph = evaluate_pressure(s, p, c, l);
            lp += jxw * std::pow(exact.p(p_time, geo.map(l)) - ph, 2);
            lphp += jxw * std::pow(evaluate_pressure(s, php, c, l) - ph, 2);
        }
    }
    out.L2_p = std::sqrt(lp);
    out.L2_Php = std::sqrt(lphp);
    return out;
}

std::vector<std::optional<double>> eoc(const std::vector<std::pair<double, double>>& h_err) {
    std::vector<std::optional<double>> rates;
    for (std::size_t i = 1; i < h_err.size(); ++i) {
        const auto [h0, e0] = h_err[i - 1];
        const auto [h1, e1] = h_err[i];
        if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1) {
            rates.emplace_back();
        } else {
            rates.emplace_back(std::log(e0 / e1) / std::log(h0 / h1));
        }
    }
    return rates;
}

void write_csv_header(std::ostream& out) {
    out << "t,E,E_d,M_sum,M_x,err_L2_u,err_L2_Pu,err_H1_u,err_L2_p,err_L2_Php,seminorm_star\n";
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.6f,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", r.t, r.q.E,
                  r.q.E_d, r.q.M.x() + r.q.M.y(), r.q.M_x, r.errors.L2_u, r.errors.L2_Pu, r.errors.H1_u, r.errors.L2_p,
                  r.errors.L2_Php, r.seminorm_star);
    out << buf;
}

}  // namespace emapr
