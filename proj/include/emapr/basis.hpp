#pragma once

#include "emapr/mesh.hpp"
#include "emapr/quadrature.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>

namespace emapr {

/// Velocity elements of order k = 1 (Bernardi-Raugel) and k = 2 (P2 plus cell bubble).
enum class ElementKind { BernardiRaugel, P2Bubble };

enum class RTOrder { RT0, RT1 };

int element_order(ElementKind kind);
std::string_view element_name(ElementKind kind);
ElementKind parse_element(std::string_view name);

/// Local velocity DOF layout:
///   BernardiRaugel: (v0,x) (v0,y) (v1,x) (v1,y) (v2,x) (v2,y), face bubbles of edges 0,1,2
///   P2Bubble: vertex DOFs as above, edge-midpoint DOFs for edges 0,1,2 (x then y), cell bubble x, y
int velocity_dofs_per_cell(ElementKind kind);
/// Index of the first bubble DOF in the local layout.
int nodal_dofs_per_cell(ElementKind kind);
int pressure_dofs_per_cell(ElementKind kind);
RTOrder rt_order_for(ElementKind kind);
int rt_dofs_per_cell(RTOrder order);

struct ShapeValue {
    Vec2 value;
    Mat2 grad;  ///< grad(r, c) = d value_r / d x_c
};

/// Face bubbles use the global normal of their edge, so they are continuous across cells.
void eval_velocity_basis(ElementKind kind, const CellGeometry& geo, const Bary& l, std::span<ShapeValue> out);

/// k = 1: {1}; k = 2: physical monomials {1, x, y}.
void eval_pressure_basis(ElementKind kind, const CellGeometry& geo, const Bary& l, std::span<double> out);

/// Barycentric position of the local nodal DOF `j` (j < nodal_dofs_per_cell) and its component.
Bary nodal_point(ElementKind kind, int j);
int nodal_component(int j);

/**
 * Raviart-Thomas basis of order 0 or 1 on one physical cell, dual to the DOFs
 *
 *   edge i, moment m:  int_{e_i} v . n_e q_m ds,  q_0 = 1, q_1 = 2s - 1
 *   interior (RT1):    int_K v . e_c dx,           c = x, y
 *
 * where n_e is the global edge normal and s runs from the global start vertex
 * of the edge to its end. Edge DOFs come first (edge-major), interior last.
 */
class RTLocalBasis {
public:
    RTLocalBasis() = default;
    RTLocalBasis(RTOrder order, const CellGeometry& geo);

    RTOrder order() const { return order_; }
    int size() const { return static_cast<int>(coeff_.cols()); }

    /// Raw polynomial basis in centred, scaled coordinates.
    void eval_raw(const Bary& l, std::span<Vec2> value, std::span<double> div) const;
    int raw_size() const { return size(); }

    void eval(const Bary& l, std::span<Vec2> value, std::span<double> div) const;

    /// coeff(r, j): coefficient of raw function r in basis function j.
    const Eigen::MatrixXd& coefficients() const { return coeff_; }

    /// Applies the DOF functionals to a field given as a function of barycentric coordinates.
    template <class Field>
    Eigen::VectorXd apply_dofs(Field&& field) const;

    const CellGeometry& geometry() const { return geo_; }

private:
    RTOrder order_ = RTOrder::RT0;
    CellGeometry geo_;
    Eigen::MatrixXd coeff_;
};

/// Barycentric coordinates of the point at parameter s on local edge i (global orientation).
Bary edge_point(const CellGeometry& geo, int i, double s);

template <class Field>
Eigen::VectorXd RTLocalBasis::apply_dofs(Field&& field) const {
    const int moments = order_ == RTOrder::RT0 ? 1 : 2;
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(order_ == RTOrder::RT0 ? 3 : 8);
    const LineRule& line = gauss_legendre(6);
    for (int i = 0; i < 3; ++i) {
        const Vec2 n = geo_.global_normal(i);
        for (int q = 0; q < line.size(); ++q) {
            const double s = line.points[q];
            const double wn = line.weights[q] * geo_.edge_length[i] * static_cast<Vec2>(field(edge_point(geo_, i, s))).dot(n);
            dofs[moments * i] += wn;
            if (moments == 2) dofs[moments * i + 1] += wn * (2.0 * s - 1.0);
        }
    }
    if (order_ == RTOrder::RT1) {
        const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 v = field(rule.points[q]);
            dofs[6] += rule.weights[q] * geo_.area() * v.x();
            dofs[7] += rule.weights[q] * geo_.area() * v.y();
        }
    }
    return dofs;
}

}  // namespace emapr
