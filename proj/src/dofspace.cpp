#include "emapr/dofspace.hpp"

#include "emapr/errors.hpp"
#include "emapr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace emapr {

VelocitySpace::VelocitySpace(std::shared_ptr<const Mesh> mesh, ElementKind kind)
    : mesh_(std::move(mesh)), kind_(kind), per_cell_(velocity_dofs_per_cell(kind)) {
    const Mesh& m = *mesh_;
    const int nv = m.num_vertices(), ne = m.num_edges(), nc = m.num_cells();
    if (kind == ElementKind::BernardiRaugel) {
        num_nodal_ = 2 * nv;
        num_bubble_ = ne;
    } else {
        num_nodal_ = 2 * (nv + ne);
        num_bubble_ = 2 * nc;
    }
    cell_dofs_.resize(static_cast<std::size_t>(nc) * per_cell_);
    for (int c = 0; c < nc; ++c) {
        int* d = cell_dofs_.data() + static_cast<std::size_t>(c) * per_cell_;
        const auto& cv = m.cell(c);
        const auto& ce = m.cell_edges(c);
        for (int i = 0; i < 3; ++i) {
            d[2 * i] = 2 * cv[i];
            d[2 * i + 1] = 2 * cv[i] + 1;
        }
        if (kind == ElementKind::BernardiRaugel) {
            for (int i = 0; i < 3; ++i) d[6 + i] = num_nodal_ + ce[i];
        } else {
            for (int i = 0; i < 3; ++i) {
                d[6 + 2 * i] = 2 * (nv + ce[i]);
                d[6 + 2 * i + 1] = 2 * (nv + ce[i]) + 1;
            }
            d[12] = num_nodal_ + 2 * c;
            d[13] = num_nodal_ + 2 * c + 1;
        }
    }
}

Vec2 VelocitySpace::nodal_position(int dof) const {
    const int node = dof / 2;
    const int nv = mesh_->num_vertices();
    if (node < nv) return mesh_->vertex(node);
    return mesh_->edge_midpoint(node - nv);
}

PressureSpace::PressureSpace(std::shared_ptr<const Mesh> mesh, ElementKind kind)
    : kind_(kind), per_cell_(pressure_dofs_per_cell(kind)) {
    const int nc = mesh->num_cells();
    cell_dofs_.resize(static_cast<std::size_t>(nc) * per_cell_);
    mean_weights_.resize(static_cast<Eigen::Index>(nc) * per_cell_);
    for (int c = 0; c < nc; ++c) {
        const auto& g = mesh->geometry(c);
        for (int j = 0; j < per_cell_; ++j) cell_dofs_[static_cast<std::size_t>(c) * per_cell_ + j] = c * per_cell_ + j;
        mean_weights_[c * per_cell_] = g.area();
        if (per_cell_ == 3) {
            const Vec2 xc = g.centroid();
            mean_weights_[c * per_cell_ + 1] = g.area() * xc.x();
            mean_weights_[c * per_cell_ + 2] = g.area() * xc.y();
        }
    }
}

Eigen::VectorXd PressureSpace::constant() const {
    Eigen::VectorXd one = Eigen::VectorXd::Zero(size());
    for (int k = 0; k < size(); k += per_cell_) one[k] = 1.0;
    return one;
}

HdivSpace::HdivSpace(std::shared_ptr<const Mesh> mesh, RTOrder order)
    : order_(order), per_cell_(rt_dofs_per_cell(order)) {
    const int ne = mesh->num_edges(), nc = mesh->num_cells();
    size_ = order == RTOrder::RT0 ? ne : 2 * ne + 2 * nc;
    cell_dofs_.resize(static_cast<std::size_t>(nc) * per_cell_);
    for (int c = 0; c < nc; ++c) {
        int* d = cell_dofs_.data() + static_cast<std::size_t>(c) * per_cell_;
        const auto& ce = mesh->cell_edges(c);
        if (order == RTOrder::RT0) {
            for (int i = 0; i < 3; ++i) d[i] = ce[i];
        } else {
            for (int i = 0; i < 3; ++i) {
                d[2 * i] = 2 * ce[i];
                d[2 * i + 1] = 2 * ce[i] + 1;
            }
            d[6] = 2 * ne + 2 * c;
            d[7] = 2 * ne + 2 * c + 1;
        }
    }
}

Spaces build_spaces(std::shared_ptr<const Mesh> mesh, ElementKind kind) {
    Spaces s;
    s.kind = kind;
    s.velocity = VelocitySpace(mesh, kind);
    s.pressure = PressureSpace(mesh, kind);
    s.hdiv = HdivSpace(mesh, rt_order_for(kind));
    s.mesh = std::move(mesh);
    return s;
}

std::vector<int> dirichlet_dofs(const VelocitySpace& space, BoundaryMode mode) {
    const Mesh& m = space.mesh();
    const int nv = m.num_vertices();
    std::set<int> dofs;

    // axis (0 = x-normal, 1 = y-normal) of every boundary edge, checked in NoPenetration mode
    auto normal_axis = [&](int e) {
        const Vec2 n = m.edge_normal(e);
        if (std::abs(n.y()) < 1e-12) return 0;
        if (std::abs(n.x()) < 1e-12) return 1;
        throw UnsupportedError("dirichlet_dofs: no-penetration requires an axis-aligned boundary");
    };

    for (int e = 0; e < m.num_edges(); ++e) {
        if (!m.is_boundary_edge(e)) continue;
        const auto& ev = m.edge(e);
        if (mode == BoundaryMode::Full) {
            for (int v : ev) {
                dofs.insert(2 * v);
                dofs.insert(2 * v + 1);
            }
            if (space.kind() == ElementKind::BernardiRaugel) {
                dofs.insert(space.num_nodal() + e);
            } else {
                dofs.insert(2 * (nv + e));
                dofs.insert(2 * (nv + e) + 1);
            }
        } else {
            const int axis = normal_axis(e);
            for (int v : ev) dofs.insert(2 * v + axis);
            if (space.kind() == ElementKind::BernardiRaugel) {
                dofs.insert(space.num_nodal() + e);
            } else {
                dofs.insert(2 * (nv + e) + axis);
            }
        }
    }
    return {dofs.begin(), dofs.end()};
}

Eigen::VectorXd nodal_interpolate(const VelocitySpace& space, const VectorField& f) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(space.size());
    for (int dof = 0; dof < space.num_nodal(); dof += 2) {
        const Vec2 value = f(space.nodal_position(dof));
        coeffs[dof] = value.x();
        coeffs[dof + 1] = value.y();
    }
    return coeffs;
}

Eigen::VectorXd interpolate(const VelocitySpace& space, const VectorField& f) {
    Eigen::VectorXd coeffs = nodal_interpolate(space, f);
    if (space.kind() != ElementKind::BernardiRaugel) return coeffs;

    const Mesh& m = space.mesh();
    const LineRule& line = gauss_legendre(8);
    for (int e = 0; e < m.num_edges(); ++e) {
        const auto& ev = m.edge(e);
        const Vec2 a = m.vertex(ev[0]), b = m.vertex(ev[1]);
        const Vec2 n = m.edge_normal(e);
        const Vec2 fa(coeffs[2 * ev[0]], coeffs[2 * ev[0] + 1]);
        const Vec2 fb(coeffs[2 * ev[1]], coeffs[2 * ev[1] + 1]);
        const double len = (b - a).norm();
        double residual = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double s = line.points[q];
            const Vec2 linear = (1.0 - s) * fa + s * fb;
            residual += line.weights[q] * len * (f((1.0 - s) * a + s * b) - linear).dot(n);
        }
        coeffs[space.num_nodal() + e] = residual / (len / 6.0);
    }
    return coeffs;
}

ShapeValue evaluate_velocity(const VelocitySpace& space, const Eigen::VectorXd& coeffs, int c, const Bary& l) {
    ShapeValue phi[14];
    const int n = space.dofs_per_cell();
    eval_velocity_basis(space.kind(), space.mesh().geometry(c), l, std::span<ShapeValue>(phi, n));
    const auto dofs = space.cell_dofs(c);
    ShapeValue out{Vec2::Zero(), Mat2::Zero()};
    for (int j = 0; j < n; ++j) {
        out.value += coeffs[dofs[j]] * phi[j].value;
        out.grad += coeffs[dofs[j]] * phi[j].grad;
    }
    return out;
}

double evaluate_pressure(const Spaces& spaces, const Eigen::VectorXd& coeffs, int c, const Bary& l) {
    double psi[3];
    const int n = spaces.pressure.dofs_per_cell();
    eval_pressure_basis(spaces.kind, spaces.mesh->geometry(c), l, std::span<double>(psi, n));
    const auto dofs = spaces.pressure.cell_dofs(c);
    double p = 0.0;
    for (int j = 0; j < n; ++j) p += coeffs[dofs[j]] * psi[j];
    return p;
}

}  // namespace emapr
