#pragma once

#include "emapr/forms.hpp"
#include "emapr/dofspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace testing {

inline std::shared_ptr<const emapr::Mesh> unit_mesh(int n, double perturb = 0.0, std::uint64_t seed = 3) {
    emapr::Mesh m = emapr::build_uniform_square_mesh(n);
    if (perturb > 0.0) m = emapr::perturb_interior_vertices(m, perturb, seed);
    return std::make_shared<const emapr::Mesh>(std::move(m));
}

/// Full-length coefficient vectors spanning V_h^0 = {v : v = 0 on Gamma, b(v, q) = 0 for all q}.
inline Eigen::MatrixXd discretely_divergence_free_basis(const emapr::Spaces& spaces) {
    const auto fixed = emapr::dirichlet_dofs(spaces.velocity, emapr::BoundaryMode::Full);
    std::vector<char> is_fixed(spaces.velocity.size(), 0);
    for (int d : fixed) is_fixed[d] = 1;
    std::vector<int> free;
    for (int d = 0; d < spaces.velocity.size(); ++d) {
        if (!is_fixed[d]) free.push_back(d);
    }
    const Eigen::MatrixXd B = Eigen::MatrixXd(emapr::assemble_div_pressure(spaces));
    Eigen::MatrixXd Bf(B.rows(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t j = 0; j < free.size(); ++j) Bf.col(static_cast<Eigen::Index>(j)) = B.col(free[j]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bf, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > 1e-10 * s[0]) ++rank;
    }
    const Eigen::MatrixXd kernel = svd.matrixV().rightCols(Bf.cols() - rank);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(spaces.velocity.size(), kernel.cols());
    for (std::size_t j = 0; j < free.size(); ++j) out.row(free[j]) = kernel.row(static_cast<Eigen::Index>(j));
    return out;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

inline double max_abs(const emapr::SparseMatrix& m) {
    double r = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (emapr::SparseMatrix::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
    }
    return r;
}

/// Cellwise max of |div Pi_h v| over the points of a degree-8 rule.
inline double max_reconstructed_divergence(const emapr::ReconstructionOperators& ops, const Eigen::VectorXd& v) {
    const auto field = emapr::reconstruct(ops, v);
    const auto& rule = emapr::quadrature_rule(emapr::kAssemblyDegree);
    double worst = 0.0;
    for (int c = 0; c < ops.mesh().num_cells(); ++c) {
        for (const auto& l : rule.points) worst = std::max(worst, std::abs(emapr::evaluate(ops, field, c, l).div));
    }
    return worst;
}

// int over each interior edge of [Pi phi . n] q for q in P^{k-1}(e), worst case over basis functions
inline double normal_jump(const emapr::ReconstructionOperators& ops) {
    const emapr::Mesh& m = ops.mesh();
    const emapr::Spaces& s = ops.spaces();
    const int moments = emapr::element_order(s.kind);
    const emapr::LineRule& line = emapr::gauss_legendre(8);
    double worst = 0.0;
    for (int j = 0; j < s.velocity.size(); ++j) {
        const auto field = emapr::reconstruct(ops, Eigen::VectorXd::Unit(s.velocity.size(), j));
        for (int e = 0; e < m.num_edges(); ++e) {
            if (m.is_boundary_edge(e)) continue;
            const emapr::Vec2 a = m.vertex(m.edge(e)[0]), b = m.vertex(m.edge(e)[1]);
            const emapr::Vec2 n = m.edge_normal(e);
            for (int k = 0; k < moments; ++k) {
                double jump = 0.0;
                for (int q = 0; q < line.size(); ++q) {
                    const emapr::Vec2 x = (1.0 - line.points[q]) * a + line.points[q] * b;
                    const double weight = line.weights[q] * (b - a).norm() * std::pow(line.points[q], k);
                    const auto& cells = m.edge_cells(e);
                    const double left = emapr::evaluate(ops, field, cells[0], m.geometry(cells[0]).barycentric(x)).value.dot(n);
                    const double right = emapr::evaluate(ops, field, cells[1], m.geometry(cells[1]).barycentric(x)).value.dot(n);
                    jump += weight * (left - right);
                }
                worst = std::max(worst, std::abs(jump));
            }
        }
    }
    return worst;
}

// B_Pi(q, j) = b(Pi phi_j, q)
inline Eigen::MatrixXd reconstructed_divergence(const emapr::ReconstructionOperators& ops) {
    const emapr::Spaces& s = ops.spaces();
    const emapr::Mesh& m = ops.mesh();
    const emapr::QuadratureRule& rule = emapr::quadrature_rule(emapr::kAssemblyDegree);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.pressure.size(), s.velocity.size());
    std::vector<double> psi(s.pressure.dofs_per_cell());
    for (int j = 0; j < s.velocity.size(); ++j) {
        const auto field = emapr::reconstruct(ops, Eigen::VectorXd::Unit(s.velocity.size(), j));
        for (int c = 0; c < m.num_cells(); ++c) {
            const auto pd = s.pressure.cell_dofs(c);
            for (int q = 0; q < rule.size(); ++q) {
                const double div = emapr::evaluate(ops, field, c, rule.points[q]).div;
                emapr::eval_pressure_basis(s.kind, m.geometry(c), rule.points[q], psi);
                for (std::size_t k = 0; k < psi.size(); ++k) out(pd[k], j) += rule.weights[q] * m.geometry(c).area() * div * psi[k];
            }
        }
    }
    return out;
}

}  // namespace testing
