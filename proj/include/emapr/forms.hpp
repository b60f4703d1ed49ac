#pragma once

#include "emapr/reconstruct.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string_view>
#include <vector>

namespace emapr {

enum class ConvectionForm { Classical, Skew, Emac, ConvReco, RotReco, Emapr };

std::string_view form_name(ConvectionForm form);
/// Accepts the lower-case names printed by form_name(); throws std::invalid_argument otherwise.
ConvectionForm parse_form(std::string_view name);
/// Reconstruction-based forms pair the time derivative through d_h and the load through Pi_h.
bool uses_reconstruction(ConvectionForm form);

/// Fixed V_h x V_h sparsity pattern with a per-cell scatter table into the value array.
class VelocityPattern {
public:
    VelocityPattern() = default;
    explicit VelocityPattern(const VelocitySpace& space);

    SparseMatrix zero_matrix() const { return pattern_; }
    void add_local(SparseMatrix& m, int c, const Eigen::MatrixXd& local) const;

private:
    SparseMatrix pattern_;
    std::vector<int> index_;
    int nloc_ = 0;
};

/// a(u, v) = (grad u, grad v)
SparseMatrix assemble_gradgrad(const VelocitySpace& space);
/// b(v, q) = (div v, q), one row per pressure DOF.
SparseMatrix assemble_div_pressure(const Spaces& spaces);
SparseMatrix assemble_plain_mass(const VelocitySpace& space);
/// d_h(u, v) = (Pi u, Pi v) + alpha (Pi^R u, Pi^R v); throws std::invalid_argument for alpha < 0.
SparseMatrix assemble_dh_mass(const ReconstructionOperators& ops, double alpha);

/**
 * Convection matrices with the advecting slot frozen at beta:
 *   N(beta)_ij = c_form(beta; phi_j, phi_i)           (trial phi_j, test phi_i)
 * and the derivative with respect to the advecting slot at a fixed trial u:
 *   Nhat(u)_ij = c_form(phi_j; u, phi_i)
 * so that N(u + du) u ~ N(u) u + Nhat(u) du + N(u) du to first order.
 */
class ConvectionAssembler {
public:
    explicit ConvectionAssembler(const ReconstructionOperators& ops);

    SparseMatrix assemble(ConvectionForm form, const Eigen::VectorXd& beta) const;
    SparseMatrix assemble_advection_derivative(ConvectionForm form, const Eigen::VectorXd& u) const;

    const VelocityPattern& pattern() const { return *pattern_; }

private:
    const ReconstructionOperators* ops_;
    std::shared_ptr<const VelocityPattern> pattern_;
};

SparseMatrix assemble_convection(const ReconstructionOperators& ops, ConvectionForm form, const Eigen::VectorXd& beta);

/// (f, Pi_h phi_i) when reconstructed, (f, phi_i) otherwise.
Eigen::VectorXd assemble_rhs(const VectorField& f, const ReconstructionOperators& ops, bool reconstructed,
                             int degree = kAssemblyDegree);

struct FormMatrices {
    SparseMatrix A;
    SparseMatrix B;
    SparseMatrix M_d;
    SparseMatrix M_plain;
    double alpha = 0.0;
};

FormMatrices assemble_forms(const ReconstructionOperators& ops, double alpha);

/// Value of c_form(a; u, v) at one quadrature point. Each argument exposes
/// value, grad, pi1, pi1_grad, piR (BasisAtPoint or FieldAtPoint).
template <class Adv, class Trial, class Test>
double convection_integrand(ConvectionForm form, const Adv& a, const Trial& u, const Test& v) {
    switch (form) {
        case ConvectionForm::Classical:
            return (u.grad * a.value).dot(v.value);
        case ConvectionForm::Skew:
            return (u.grad * a.value).dot(v.value) + 0.5 * a.grad.trace() * u.value.dot(v.value);
        case ConvectionForm::Emac:
            return ((u.grad + u.grad.transpose()) * a.value).dot(v.value) + u.grad.trace() * a.value.dot(v.value);
        case ConvectionForm::ConvReco:
            return (u.grad * a.value).dot(v.pi());
        case ConvectionForm::RotReco: {
            const double omega = a.grad(1, 0) - a.grad(0, 1);
            const Vec2 w = u.pi();
            return omega * Vec2(-w.y(), w.x()).dot(v.pi());
        }
        case ConvectionForm::Emapr: {
            const Vec2 pa = a.pi();
            return (u.pi1_grad * pa).dot(v.pi()) - (v.pi1_grad * pa).dot(u.piR);
        }
    }
    return 0.0;
}

}  // namespace emapr
