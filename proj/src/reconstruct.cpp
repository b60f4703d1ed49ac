#include "emapr/reconstruct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emapr {

namespace {

constexpr int kMaxVelocityDofs = 14;
constexpr int kMaxRtDofs = 8;

// Relative threshold below which a quadrature-computed RT moment is treated as zero.
constexpr double kPruneTolerance = 1e-14;

}  // namespace

ReconstructionOperators::ReconstructionOperators(const Spaces& spaces) : spaces_(spaces) {
    const Mesh& m = *spaces_.mesh;
    const VelocitySpace& V = spaces_.velocity;
    const HdivSpace& X = spaces_.hdiv;
    const int nc = m.num_cells();
    const int nv_loc = V.dofs_per_cell();
    const int nodal_loc = nodal_dofs_per_cell(spaces_.kind);
    const int nrt_loc = X.dofs_per_cell();

    std::vector<Eigen::Triplet<double>> p1_entries;
    p1_entries.reserve(V.num_nodal());
    for (int i = 0; i < V.num_nodal(); ++i) p1_entries.emplace_back(i, i, 1.0);
    p1_.resize(V.num_nodal(), V.size());
    p1_.setFromTriplets(p1_entries.begin(), p1_entries.end());

    rt_basis_.resize(nc);
    std::vector<Eigen::Triplet<double>> pr_entries;
    for (int c = 0; c < nc; ++c) {
        const CellGeometry& geo = m.geometry(c);
        rt_basis_[c] = RTLocalBasis(X.order(), geo);
        const auto vdofs = V.cell_dofs(c);
        const auto xdofs = X.cell_dofs(c);
        ShapeValue phi[kMaxVelocityDofs];
        for (int j = nodal_loc; j < nv_loc; ++j) {
            // I_h annihilates bubbles, so Pi^R phi_j = Pi^RT phi_j
            const Eigen::VectorXd moments = rt_basis_[c].apply_dofs([&](const Bary& l) {
                eval_velocity_basis(spaces_.kind, geo, l, std::span<ShapeValue>(phi, nv_loc));
                return phi[j].value;
            });
            const double scale = moments.cwiseAbs().maxCoeff();
            for (int i = 0; i < nrt_loc; ++i) {
                if (std::abs(moments[i]) <= kPruneTolerance * scale) continue;
                // shared edge moments are taken from the lower-index cell only
                const bool edge_dof = X.order() == RTOrder::RT0 || i < 6;
                const int local_edge = X.order() == RTOrder::RT0 ? i : i / 2;
                if (edge_dof && geo.edge_sign[local_edge] < 0) continue;
                pr_entries.emplace_back(xdofs[i], vdofs[j], moments[i]);
            }
        }
    }
    pr_.resize(X.size(), V.size());
    pr_.setFromTriplets(pr_entries.begin(), pr_entries.end());

    // gather the per-cell maps back from the global operator
    const Eigen::SparseMatrix<double, Eigen::RowMajor> pr_rows(pr_);
    local_map_.resize(nc);
    local_raw_map_.resize(nc);
    for (int c = 0; c < nc; ++c) {
        const auto vdofs = V.cell_dofs(c);
        const auto xdofs = X.cell_dofs(c);
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nrt_loc, nv_loc);
        for (int i = 0; i < nrt_loc; ++i) {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(pr_rows, xdofs[i]); it; ++it) {
                for (int j = 0; j < nv_loc; ++j) {
                    if (vdofs[j] == it.col()) local(i, j) = it.value();
                }
            }
        }
        local_raw_map_[c] = rt_basis_[c].coefficients() * local;
        local_map_[c] = std::move(local);
    }
}

ReconstructionOperators build_reconstruction(const Spaces& spaces) { return ReconstructionOperators(spaces); }

ReconstructedField reconstruct(const ReconstructionOperators& ops, const Eigen::VectorXd& v) {
    if (v.size() != ops.spaces().velocity.size()) {
        throw std::invalid_argument("reconstruct: coefficient vector has length " + std::to_string(v.size()) +
                                    ", expected " + std::to_string(ops.spaces().velocity.size()));
    }
    return {ops.nodal_map() * v, ops.rt_map() * v};
}

ReconstructedField reconstruct_function(const ReconstructionOperators& ops, const VectorField& f) {
    const Spaces& s = ops.spaces();
    const Mesh& m = ops.mesh();
    const Eigen::VectorXd nodal = nodal_interpolate(s.velocity, f);
    ReconstructedField out;
    out.nodal_part = nodal.head(s.velocity.num_nodal());
    out.rt_part = Eigen::VectorXd::Zero(s.hdiv.size());

    const int nv_loc = s.velocity.dofs_per_cell();
    const int nodal_loc = nodal_dofs_per_cell(s.kind);
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry& geo = m.geometry(c);
        const auto vdofs = s.velocity.cell_dofs(c);
        ShapeValue phi[kMaxVelocityDofs];
        const Eigen::VectorXd moments = ops.rt_basis(c).apply_dofs([&](const Bary& l) {
            eval_velocity_basis(s.kind, geo, l, std::span<ShapeValue>(phi, nv_loc));
            Vec2 interp = Vec2::Zero();
            for (int j = 0; j < nodal_loc; ++j) interp += nodal[vdofs[j]] * phi[j].value;
            return Vec2(f(geo.map(l)) - interp);
        });
        const auto xdofs = s.hdiv.cell_dofs(c);
        for (int i = 0; i < s.hdiv.dofs_per_cell(); ++i) out.rt_part[xdofs[i]] = moments[i];
    }
    return out;
}

FieldValue evaluate_rt(const ReconstructionOperators& ops, const Eigen::VectorXd& rt_coeffs, int c, const Bary& l) {
    const RTLocalBasis& rt = ops.rt_basis(c);
    const int n = rt.size();
    Vec2 psi[kMaxRtDofs];
    double div[kMaxRtDofs];
    rt.eval(l, std::span<Vec2>(psi, n), std::span<double>(div, n));
    const auto xdofs = ops.spaces().hdiv.cell_dofs(c);
    FieldValue out{Vec2::Zero(), 0.0};
    for (int i = 0; i < n; ++i) {
        out.value += rt_coeffs[xdofs[i]] * psi[i];
        out.div += rt_coeffs[xdofs[i]] * div[i];
    }
    return out;
}

FieldValue evaluate(const ReconstructionOperators& ops, const ReconstructedField& field, int c, const Bary& l) {
    const Spaces& s = ops.spaces();
    const int nv_loc = s.velocity.dofs_per_cell();
    const int nodal_loc = nodal_dofs_per_cell(s.kind);
    ShapeValue phi[kMaxVelocityDofs];
    eval_velocity_basis(s.kind, ops.mesh().geometry(c), l, std::span<ShapeValue>(phi, nv_loc));
    const auto vdofs = s.velocity.cell_dofs(c);
    FieldValue out = evaluate_rt(ops, field.rt_part, c, l);
    for (int j = 0; j < nodal_loc; ++j) {
        out.value += field.nodal_part[vdofs[j]] * phi[j].value;
        out.div += field.nodal_part[vdofs[j]] * phi[j].grad.trace();
    }
    return out;
}

Eigen::VectorXd l2_project_divergence(const Spaces& spaces, const CellScalarField& g, int degree) {
    const Mesh& m = *spaces.mesh;
    const QuadratureRule& rule = quadrature_rule(degree);
    const int np = spaces.pressure.dofs_per_cell();
    Eigen::VectorXd out(spaces.pressure.size());
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry& geo = m.geometry(c);
        const Vec2 xc = geo.centroid();
        // solve in the centred basis {1, (x - xc)/h, (y - yc)/h}, then map to {1, x, y}
        Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * geo.area();
            const Vec2 xi = (geo.map(rule.points[q]) - xc) / geo.diameter;
            const Eigen::Vector3d psi(1.0, xi.x(), xi.y());
            const double gq = g(c, rule.points[q]);
            rhs.head(np) += w * gq * psi.head(np);
            mass.topLeftCorner(np, np) += w * psi.head(np) * psi.head(np).transpose();
        }
        Eigen::Vector3d local = Eigen::Vector3d::Zero();
        local.head(np) = mass.topLeftCorner(np, np).ldlt().solve(rhs.head(np));
        const auto dofs = spaces.pressure.cell_dofs(c);
        if (np == 1) {
            out[dofs[0]] = local[0];
        } else {
            const double cx = local[1] / geo.diameter, cy = local[2] / geo.diameter;
            out[dofs[0]] = local[0] - cx * xc.x() - cy * xc.y();
            out[dofs[1]] = cx;
            out[dofs[2]] = cy;
        }
    }
    return out;
}

Eigen::VectorXd l2_project_divergence(const Spaces& spaces, const ScalarField& g, int degree) {
    const Mesh& m = *spaces.mesh;
    return l2_project_divergence(
        spaces, CellScalarField([&](int c, const Bary& l) { return g(m.geometry(c).map(l)); }), degree);
}

double seminorm_star(const ReconstructionOperators& ops, const Eigen::VectorXd& v) {
    const Eigen::VectorXd rt = reconstruct(ops, v).rt_part;
    const Mesh& m = ops.mesh();
    const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
    double sum = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry& geo = m.geometry(c);
        double local = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
            local += rule.weights[q] * geo.area() * evaluate_rt(ops, rt, c, rule.points[q]).value.squaredNorm();
        }
        sum += local / (geo.diameter * geo.diameter);
    }
    return std::sqrt(sum);
}

CellTabulation::CellTabulation(const ReconstructionOperators& ops, const QuadratureRule& rule)
    : ops_(&ops),
      rule_(&rule),
      ndofs_(ops.spaces().velocity.dofs_per_cell()),
      npdofs_(ops.spaces().pressure.dofs_per_cell()),
      basis_(static_cast<std::size_t>(rule.size()) * ndofs_),
      pbasis_(static_cast<std::size_t>(rule.size()) * npdofs_),
      jxw_(rule.size()),
      x_(rule.size()) {}

void CellTabulation::reinit(int cell) {
    cell_ = cell;
    const ElementKind kind = ops_->kind();
    const CellGeometry& geo = ops_->mesh().geometry(cell);
    const RTLocalBasis& rt = ops_->rt_basis(cell);
    const Eigen::MatrixXd& raw_map = ops_->local_raw_map(cell);
    const int nodal_loc = nodal_dofs_per_cell(kind);
    const int nraw = rt.raw_size();
    ShapeValue phi[kMaxVelocityDofs];
    Vec2 raw[kMaxRtDofs];
    double raw_div[kMaxRtDofs];

    for (int q = 0; q < rule_->size(); ++q) {
        const Bary& l = rule_->points[q];
        jxw_[q] = rule_->weights[q] * geo.area();
        x_[q] = geo.map(l);
        eval_velocity_basis(kind, geo, l, std::span<ShapeValue>(phi, ndofs_));
        rt.eval_raw(l, std::span<Vec2>(raw, nraw), std::span<double>(raw_div, nraw));
        for (int j = 0; j < ndofs_; ++j) {
            BasisAtPoint& b = basis_[static_cast<std::size_t>(q) * ndofs_ + j];
            b.value = phi[j].value;
            b.grad = phi[j].grad;
            if (j < nodal_loc) {
                b.pi1 = phi[j].value;
                b.pi1_grad = phi[j].grad;
                b.piR.setZero();
                b.piR_div = 0.0;
            } else {
                b.pi1.setZero();
                b.pi1_grad.setZero();
                b.piR.setZero();
                b.piR_div = 0.0;
                for (int r = 0; r < nraw; ++r) {
                    b.piR += raw_map(r, j) * raw[r];
                    b.piR_div += raw_map(r, j) * raw_div[r];
                }
            }
        }
        eval_pressure_basis(kind, geo, l, std::span<double>(&pbasis_[static_cast<std::size_t>(q) * npdofs_], npdofs_));
    }
}

std::span<const int> CellTabulation::dofs() const { return ops_->spaces().velocity.cell_dofs(cell_); }

std::span<const int> CellTabulation::pressure_dofs() const { return ops_->spaces().pressure.cell_dofs(cell_); }

FieldAtPoint CellTabulation::field(int q, const Eigen::VectorXd& coeffs) const {
    FieldAtPoint f;
    const auto d = dofs();
    for (int j = 0; j < ndofs_; ++j) {
        const double a = coeffs[d[j]];
        if (a == 0.0) continue;
        const BasisAtPoint& b = at(q, j);
        f.value += a * b.value;
        f.grad += a * b.grad;
        f.pi1 += a * b.pi1;
        f.pi1_grad += a * b.pi1_grad;
        f.piR += a * b.piR;
        f.piR_div += a * b.piR_div;
    }
    return f;
}

}  // namespace emapr
