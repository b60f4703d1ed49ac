#pragma once

#include "emapr/basis.hpp"
#include "emapr/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace emapr {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;

/// V_h = nodal block (continuous P^k, DOFs [0, num_nodal)) + bubble block (DOFs [num_nodal, size)).
class VelocitySpace {
public:
    VelocitySpace() = default;
    VelocitySpace(std::shared_ptr<const Mesh> mesh, ElementKind kind);

    ElementKind kind() const { return kind_; }
    const Mesh& mesh() const { return *mesh_; }
    int size() const { return num_nodal_ + num_bubble_; }
    int num_nodal() const { return num_nodal_; }
    int num_bubble() const { return num_bubble_; }
    int dofs_per_cell() const { return per_cell_; }
    bool is_bubble(int dof) const { return dof >= num_nodal_; }
    std::span<const int> cell_dofs(int c) const {
        return {cell_dofs_.data() + static_cast<std::size_t>(c) * per_cell_, static_cast<std::size_t>(per_cell_)};
    }
    /// Node position and vector component of a nodal DOF.
    Vec2 nodal_position(int dof) const;
    int nodal_component(int dof) const { return dof % 2; }

private:
    std::shared_ptr<const Mesh> mesh_;
    ElementKind kind_ = ElementKind::BernardiRaugel;
    int num_nodal_ = 0;
    int num_bubble_ = 0;
    int per_cell_ = 0;
    std::vector<int> cell_dofs_;
};

/// Discontinuous P^{k-1}; mean_weights() is the row vector m with m . p = int_Omega p_h.
class PressureSpace {
public:
    PressureSpace() = default;
    PressureSpace(std::shared_ptr<const Mesh> mesh, ElementKind kind);

    ElementKind kind() const { return kind_; }
    int size() const { return static_cast<int>(mean_weights_.size()); }
    int dofs_per_cell() const { return per_cell_; }
    std::span<const int> cell_dofs(int c) const {
        return {cell_dofs_.data() + static_cast<std::size_t>(c) * per_cell_, static_cast<std::size_t>(per_cell_)};
    }
    const Eigen::VectorXd& mean_weights() const { return mean_weights_; }
    /// Coefficients of the constant function 1.
    Eigen::VectorXd constant() const;

private:
    ElementKind kind_ = ElementKind::BernardiRaugel;
    int per_cell_ = 0;
    std::vector<int> cell_dofs_;
    Eigen::VectorXd mean_weights_;
};

/// Raviart-Thomas space of order k-1; edge DOFs are shared, interior DOFs are cell-local.
class HdivSpace {
public:
    HdivSpace() = default;
    HdivSpace(std::shared_ptr<const Mesh> mesh, RTOrder order);

    RTOrder order() const { return order_; }
    int size() const { return size_; }
    int dofs_per_cell() const { return per_cell_; }
    std::span<const int> cell_dofs(int c) const {
        return {cell_dofs_.data() + static_cast<std::size_t>(c) * per_cell_, static_cast<std::size_t>(per_cell_)};
    }

private:
    RTOrder order_ = RTOrder::RT0;
    int size_ = 0;
    int per_cell_ = 0;
    std::vector<int> cell_dofs_;
};

struct Spaces {
    std::shared_ptr<const Mesh> mesh;
    ElementKind kind = ElementKind::BernardiRaugel;
    VelocitySpace velocity;
    PressureSpace pressure;
    HdivSpace hdiv;
};

Spaces build_spaces(std::shared_ptr<const Mesh> mesh, ElementKind kind);

enum class BoundaryMode { Full, NoPenetration };

/// Sorted indices of constrained velocity DOFs. NoPenetration requires an
/// axis-aligned boundary and constrains only normal components (both at corners)
/// plus the boundary face bubbles of the Bernardi-Raugel element.
std::vector<int> dirichlet_dofs(const VelocitySpace& space, BoundaryMode mode);

/// Nodal interpolant I_h f (bubble coefficients zero).
Eigen::VectorXd nodal_interpolate(const VelocitySpace& space, const VectorField& f);

/// Canonical interpolant: nodal values, and for Bernardi-Raugel each face
/// bubble chosen so the edge flux of the interpolant equals that of f.
Eigen::VectorXd interpolate(const VelocitySpace& space, const VectorField& f);

/// Evaluates a velocity coefficient vector at a point of cell c.
ShapeValue evaluate_velocity(const VelocitySpace& space, const Eigen::VectorXd& coeffs, int c, const Bary& l);

double evaluate_pressure(const Spaces& spaces, const Eigen::VectorXd& coeffs, int c, const Bary& l);

}  // namespace emapr
