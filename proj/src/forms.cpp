#include "emapr/forms.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace emapr {

std::string_view form_name(ConvectionForm form) {
    switch (form) {
        case ConvectionForm::Classical: return "classical";
        case ConvectionForm::Skew: return "skew";
        case ConvectionForm::Emac: return "emac";
        case ConvectionForm::ConvReco: return "convreco";
        case ConvectionForm::RotReco: return "rotreco";
        case ConvectionForm::Emapr: return "emapr";
    }
    return "unknown";
}

ConvectionForm parse_form(std::string_view name) {
    for (auto f : {ConvectionForm::Classical, ConvectionForm::Skew, ConvectionForm::Emac, ConvectionForm::ConvReco,
                   ConvectionForm::RotReco, ConvectionForm::Emapr}) {
        if (form_name(f) == name) return f;
    }
    throw std::invalid_argument("unknown convection form '" + std::string(name) + "'");
}

bool uses_reconstruction(ConvectionForm form) {
    return form == ConvectionForm::ConvReco || form == ConvectionForm::RotReco || form == ConvectionForm::Emapr;
}

VelocityPattern::VelocityPattern(const VelocitySpace& space) : nloc_(space.dofs_per_cell()) {
    const int n = space.size();
    const int nc = space.mesh().num_cells();
    std::vector<std::vector<int>> cols(n);
    for (int c = 0; c < nc; ++c) {
        const auto d = space.cell_dofs(c);
        for (int j : d) {
            for (int i : d) cols[j].push_back(i);
        }
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (int j = 0; j < n; ++j) {
        auto& rows = cols[j];
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        for (int i : rows) entries.emplace_back(i, j, 0.0);
    }
    pattern_.resize(n, n);
    pattern_.setFromTriplets(entries.begin(), entries.end());
    pattern_.makeCompressed();

    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    index_.resize(static_cast<std::size_t>(nc) * nloc_ * nloc_);
    for (int c = 0; c < nc; ++c) {
        const auto d = space.cell_dofs(c);
        for (int j = 0; j < nloc_; ++j) {
            const int* begin = inner + outer[d[j]];
            const int* end = inner + outer[d[j] + 1];
            for (int i = 0; i < nloc_; ++i) {
                const int* pos = std::lower_bound(begin, end, d[i]);
                index_[(static_cast<std::size_t>(c) * nloc_ + j) * nloc_ + i] = static_cast<int>(pos - inner);
            }
        }
    }
}

void VelocityPattern::add_local(SparseMatrix& m, int c, const Eigen::MatrixXd& local) const {
    double* values = m.valuePtr();
    const int* idx = index_.data() + static_cast<std::size_t>(c) * nloc_ * nloc_;
    for (int j = 0; j < nloc_; ++j) {
        for (int i = 0; i < nloc_; ++i) values[idx[j * nloc_ + i]] += local(i, j);
    }
}

namespace {

// Velocity-only assembly through a plain basis evaluation (no reconstruction needed).
template <class Kernel>
SparseMatrix assemble_plain(const VelocitySpace& space, Kernel&& kernel) {
    const VelocityPattern pattern(space);
    SparseMatrix m = pattern.zero_matrix();
    const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
    const int n = space.dofs_per_cell();
    std::vector<ShapeValue> phi(static_cast<std::size_t>(n));
    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < space.mesh().num_cells(); ++c) {
        const CellGeometry& geo = space.mesh().geometry(c);
        local.setZero();
        for (int q = 0; q < rule.size(); ++q) {
            eval_velocity_basis(space.kind(), geo, rule.points[q], phi);
            const double w = rule.weights[q] * geo.area();
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) local(i, j) += w * kernel(phi[i], phi[j]);
            }
        }
        pattern.add_local(m, c, local);
    }
    return m;
}

}  // namespace

SparseMatrix assemble_gradgrad(const VelocitySpace& space) {
    return assemble_plain(space, [](const ShapeValue& a, const ShapeValue& b) { return a.grad.cwiseProduct(b.grad).sum(); });
}

SparseMatrix assemble_plain_mass(const VelocitySpace& space) {
    return assemble_plain(space, [](const ShapeValue& a, const ShapeValue& b) { return a.value.dot(b.value); });
}

SparseMatrix assemble_div_pressure(const Spaces& spaces) {
    const Mesh& m = *spaces.mesh;
    const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
    const int nv = spaces.velocity.dofs_per_cell();
    const int np = spaces.pressure.dofs_per_cell();
    std::vector<ShapeValue> phi(static_cast<std::size_t>(nv));
    double psi[3];
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(m.num_cells()) * nv * np);
    Eigen::MatrixXd local(np, nv);
    for (int c = 0; c < m.num_cells(); ++c) {
        const CellGeometry& geo = m.geometry(c);
        local.setZero();
        for (int q = 0; q < rule.size(); ++q) {
            eval_velocity_basis(spaces.kind, geo, rule.points[q], phi);
            eval_pressure_basis(spaces.kind, geo, rule.points[q], std::span<double>(psi, np));
            const double w = rule.weights[q] * geo.area();
            for (int j = 0; j < nv; ++j) {
                const double div = phi[j].grad.trace();
                for (int i = 0; i < np; ++i) local(i, j) += w * div * psi[i];
            }
        }
        const auto vd = spaces.velocity.cell_dofs(c);
        const auto pd = spaces.pressure.cell_dofs(c);
        for (int i = 0; i < np; ++i) {
            for (int j = 0; j < nv; ++j) entries.emplace_back(pd[i], vd[j], local(i, j));
        }
    }
    SparseMatrix B(spaces.pressure.size(), spaces.velocity.size());
    B.setFromTriplets(entries.begin(), entries.end());
    return B;
}

SparseMatrix assemble_dh_mass(const ReconstructionOperators& ops, double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("assemble_dh_mass: alpha must be non-negative");
    const VelocitySpace& V = ops.spaces().velocity;
    const VelocityPattern pattern(V);
    SparseMatrix m = pattern.zero_matrix();
    CellTabulation tab(ops, quadrature_rule(kAssemblyDegree));
    const int n = V.dofs_per_cell();
    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < ops.mesh().num_cells(); ++c) {
        tab.reinit(c);
        local.setZero();
        for (int q = 0; q < tab.num_points(); ++q) {
            const double w = tab.JxW(q);
            for (int j = 0; j < n; ++j) {
                const BasisAtPoint& bj = tab.at(q, j);
                const Vec2 pj = bj.pi();
                for (int i = 0; i < n; ++i) {
                    const BasisAtPoint& bi = tab.at(q, i);
                    local(i, j) += w * (bi.pi().dot(pj) + alpha * bi.piR.dot(bj.piR));
                }
            }
        }
        pattern.add_local(m, c, local);
    }
    return m;
}

ConvectionAssembler::ConvectionAssembler(const ReconstructionOperators& ops)
    : ops_(&ops), pattern_(std::make_shared<const VelocityPattern>(ops.spaces().velocity)) {}

SparseMatrix ConvectionAssembler::assemble(ConvectionForm form, const Eigen::VectorXd& beta) const {
    SparseMatrix m = pattern_->zero_matrix();
    CellTabulation tab(*ops_, quadrature_rule(kAssemblyDegree));
    const int n = tab.num_dofs();
    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < ops_->mesh().num_cells(); ++c) {
        tab.reinit(c);
        local.setZero();
        for (int q = 0; q < tab.num_points(); ++q) {
            const FieldAtPoint a = tab.field(q, beta);
            const double w = tab.JxW(q);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    local(i, j) += w * convection_integrand(form, a, tab.at(q, j), tab.at(q, i));
                }
            }
        }
        pattern_->add_local(m, c, local);
    }
    return m;
}

SparseMatrix ConvectionAssembler::assemble_advection_derivative(ConvectionForm form, const Eigen::VectorXd& u) const {
    SparseMatrix m = pattern_->zero_matrix();
    CellTabulation tab(*ops_, quadrature_rule(kAssemblyDegree));
    const int n = tab.num_dofs();
    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < ops_->mesh().num_cells(); ++c) {
        tab.reinit(c);
        local.setZero();
        for (int q = 0; q < tab.num_points(); ++q) {
            const FieldAtPoint uq = tab.field(q, u);
            const double w = tab.JxW(q);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    local(i, j) += w * convection_integrand(form, tab.at(q, j), uq, tab.at(q, i));
                }
            }
        }
        pattern_->add_local(m, c, local);
    }
    return m;
}

SparseMatrix assemble_convection(const ReconstructionOperators& ops, ConvectionForm form, const Eigen::VectorXd& beta) {
    return ConvectionAssembler(ops).assemble(form, beta);
}

Eigen::VectorXd assemble_rhs(const VectorField& f, const ReconstructionOperators& ops, bool reconstructed, int degree) {
    const VelocitySpace& V = ops.spaces().velocity;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(V.size());
    CellTabulation tab(ops, quadrature_rule(degree));
    for (int c = 0; c < ops.mesh().num_cells(); ++c) {
        tab.reinit(c);
        const auto d = tab.dofs();
        for (int q = 0; q < tab.num_points(); ++q) {
            const Vec2 fq = f(tab.point(q)) * tab.JxW(q);
            for (int i = 0; i < tab.num_dofs(); ++i) {
                const BasisAtPoint& b = tab.at(q, i);
                rhs[d[i]] += fq.dot(reconstructed ? b.pi() : b.value);
            }
        }
    }
    return rhs;
}

FormMatrices assemble_forms(const ReconstructionOperators& ops, double alpha) {
    FormMatrices f;
    f.alpha = alpha;
    f.A = assemble_gradgrad(ops.spaces().velocity);
    f.B = assemble_div_pressure(ops.spaces());
    f.M_d = assemble_dh_mass(ops, alpha);
    f.M_plain = assemble_plain_mass(ops.spaces().velocity);
    return f;
}

}  // namespace emapr
