#pragma once

#include "emapr/basis.hpp"
#include "emapr/dofspace.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <vector>

namespace emapr {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Image of the reconstruction: continuous P^k coefficients plus RT_{k-1} coefficients.
struct ReconstructedField {
    Eigen::VectorXd nodal_part;  ///< indexed like the nodal block of V_h
    Eigen::VectorXd rt_part;     ///< indexed like HdivSpace
};

/**
 * Divergence-free reconstruction Pi_h = I_h + Pi_RT o (1 - I_h) on V_h.
 *
 * For both elements I_h annihilates the bubble block and reproduces the nodal
 * block, so Pi_h^1 = [I 0] and Pi_h^R only sees bubble coefficients. The
 * per-cell maps are gathered from the global operator, so evaluation on either
 * side of an edge uses identical edge DOFs.
 */
class ReconstructionOperators {
public:
    ReconstructionOperators() = default;
    explicit ReconstructionOperators(const Spaces& spaces);

    const Spaces& spaces() const { return spaces_; }
    const Mesh& mesh() const { return *spaces_.mesh; }
    ElementKind kind() const { return spaces_.kind; }

    /// V_h -> nodal P^k coefficients (num_nodal x size).
    const SparseMatrix& nodal_map() const { return p1_; }
    /// V_h -> RT coefficients (hdiv.size x velocity.size).
    const SparseMatrix& rt_map() const { return pr_; }

    const RTLocalBasis& rt_basis(int c) const { return rt_basis_[c]; }
    /// Local RT DOFs of Pi_h^R phi_j for the local velocity basis (rt_dofs x velocity_dofs).
    const Eigen::MatrixXd& local_map(int c) const { return local_map_[c]; }
    /// Same map expressed in the raw RT polynomial basis.
    const Eigen::MatrixXd& local_raw_map(int c) const { return local_raw_map_[c]; }

private:
    Spaces spaces_;
    SparseMatrix p1_;
    SparseMatrix pr_;
    std::vector<RTLocalBasis> rt_basis_;
    std::vector<Eigen::MatrixXd> local_map_;
    std::vector<Eigen::MatrixXd> local_raw_map_;
};

ReconstructionOperators build_reconstruction(const Spaces& spaces);

/// Pi_h v as (nodal part, RT part). Throws std::invalid_argument on a length mismatch.
ReconstructedField reconstruct(const ReconstructionOperators& ops, const Eigen::VectorXd& v);

/// I_h f + Pi_RT (f - I_h f) for an arbitrary continuous field.
ReconstructedField reconstruct_function(const ReconstructionOperators& ops, const VectorField& f);

struct FieldValue {
    Vec2 value;
    double div = 0.0;
};

FieldValue evaluate(const ReconstructionOperators& ops, const ReconstructedField& field, int c, const Bary& l);
/// RT part alone.
FieldValue evaluate_rt(const ReconstructionOperators& ops, const Eigen::VectorXd& rt_coeffs, int c, const Bary& l);

/// P_h: cellwise L2 projection onto W_h of a field given per cell in barycentric coordinates.
using CellScalarField = std::function<double(int, const Bary&)>;
Eigen::VectorXd l2_project_divergence(const Spaces& spaces, const CellScalarField& g, int degree = kAssemblyDegree);
Eigen::VectorXd l2_project_divergence(const Spaces& spaces, const ScalarField& g, int degree = kAssemblyDegree);

/// sqrt( sum_K h_K^{-2} ||Pi_h^R v||_K^2 )
double seminorm_star(const ReconstructionOperators& ops, const Eigen::VectorXd& v);

/// Values of one local velocity basis function and its reconstructions at a quadrature point.
struct BasisAtPoint {
    Vec2 value;
    Mat2 grad;
    Vec2 pi1;       ///< Pi_h^1 phi (the nodal part; zero for bubbles)
    Mat2 pi1_grad;
    Vec2 piR;       ///< Pi_h^R phi
    double piR_div = 0.0;
    Vec2 pi() const { return pi1 + piR; }
};

/// A velocity field sampled at a quadrature point, with the same slots as BasisAtPoint.
struct FieldAtPoint {
    Vec2 value = Vec2::Zero();
    Mat2 grad = Mat2::Zero();
    Vec2 pi1 = Vec2::Zero();
    Mat2 pi1_grad = Mat2::Zero();
    Vec2 piR = Vec2::Zero();
    double piR_div = 0.0;
    Vec2 pi() const { return pi1 + piR; }
    double div() const { return grad.trace(); }
    double curl() const { return grad(1, 0) - grad(0, 1); }
};

/**
 * Per-cell tabulation of the local velocity basis, its reconstructions and the
 * pressure basis on a fixed quadrature rule. Reuse one object across cells.
 */
class CellTabulation {
public:
    CellTabulation(const ReconstructionOperators& ops, const QuadratureRule& rule);

    void reinit(int cell);

    int cell() const { return cell_; }
    int num_points() const { return rule_->size(); }
    int num_dofs() const { return ndofs_; }
    int num_pressure_dofs() const { return npdofs_; }
    double JxW(int q) const { return jxw_[q]; }
    const Vec2& point(int q) const { return x_[q]; }
    const Bary& bary(int q) const { return rule_->points[q]; }
    const BasisAtPoint& at(int q, int j) const { return basis_[static_cast<std::size_t>(q) * ndofs_ + j]; }
    double pressure(int q, int j) const { return pbasis_[static_cast<std::size_t>(q) * npdofs_ + j]; }
    std::span<const int> dofs() const;
    std::span<const int> pressure_dofs() const;

    FieldAtPoint field(int q, const Eigen::VectorXd& coeffs) const;

private:
    const ReconstructionOperators* ops_;
    const QuadratureRule* rule_;
    int cell_ = -1;
    int ndofs_ = 0;
    int npdofs_ = 0;
    std::vector<BasisAtPoint> basis_;
    std::vector<double> pbasis_;
    std::vector<double> jxw_;
    std::vector<Vec2> x_;
};

}  // namespace emapr
