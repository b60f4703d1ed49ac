#include "emapr/basis.hpp"

#include <stdexcept>
#include <string>

namespace emapr {

int element_order(ElementKind kind) { return kind == ElementKind::BernardiRaugel ? 1 : 2; }

std::string_view element_name(ElementKind kind) {
    return kind == ElementKind::BernardiRaugel ? "br" : "p2bubble";
}

ElementKind parse_element(std::string_view name) {
    if (name == "br" || name == "bernardi-raugel" || name == "BR") return ElementKind::BernardiRaugel;
    if (name == "p2bubble" || name == "p2b" || name == "P2bubble") return ElementKind::P2Bubble;
    throw std::invalid_argument("unknown element kind '" + std::string(name) + "'");
}

int velocity_dofs_per_cell(ElementKind kind) { return kind == ElementKind::BernardiRaugel ? 9 : 14; }
int nodal_dofs_per_cell(ElementKind kind) { return kind == ElementKind::BernardiRaugel ? 6 : 12; }
int pressure_dofs_per_cell(ElementKind kind) { return kind == ElementKind::BernardiRaugel ? 1 : 3; }
RTOrder rt_order_for(ElementKind kind) { return kind == ElementKind::BernardiRaugel ? RTOrder::RT0 : RTOrder::RT1; }
int rt_dofs_per_cell(RTOrder order) { return order == RTOrder::RT0 ? 3 : 8; }

void eval_velocity_basis(ElementKind kind, const CellGeometry& geo, const Bary& l, std::span<ShapeValue> out) {
    const auto& g = geo.grad_lambda;
    auto vector_pair = [&](int j, double value, const Vec2& grad) {
        out[j].value = Vec2(value, 0.0);
        out[j].grad.row(0) = grad.transpose();
        out[j].grad.row(1).setZero();
        out[j + 1].value = Vec2(0.0, value);
        out[j + 1].grad.row(0).setZero();
        out[j + 1].grad.row(1) = grad.transpose();
    };

    if (kind == ElementKind::BernardiRaugel) {
        for (int i = 0; i < 3; ++i) vector_pair(2 * i, l[i], g[i]);
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3, k = (i + 2) % 3;
            const Vec2 n = geo.global_normal(i);
            out[6 + i].value = l[j] * l[k] * n;
            out[6 + i].grad = n * (l[k] * g[j] + l[j] * g[k]).transpose();
        }
        return;
    }

    for (int i = 0; i < 3; ++i) vector_pair(2 * i, l[i] * (2.0 * l[i] - 1.0), (4.0 * l[i] - 1.0) * g[i]);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        vector_pair(6 + 2 * i, 4.0 * l[j] * l[k], 4.0 * (l[k] * g[j] + l[j] * g[k]));
    }
    const double bk = l[0] * l[1] * l[2];
    const Vec2 gbk = l[1] * l[2] * g[0] + l[0] * l[2] * g[1] + l[0] * l[1] * g[2];
    vector_pair(12, bk, gbk);
}

void eval_pressure_basis(ElementKind kind, const CellGeometry& geo, const Bary& l, std::span<double> out) {
    out[0] = 1.0;
    if (kind == ElementKind::P2Bubble) {
        const Vec2 x = geo.map(l);
        out[1] = x.x();
        out[2] = x.y();
    }
}

Bary nodal_point(ElementKind kind, int j) {
    const int node = j / 2;
    if (node < 3) {
        Bary b{0.0, 0.0, 0.0};
        b[node] = 1.0;
        return b;
    }
    if (kind == ElementKind::P2Bubble && node < 6) {
        const int i = node - 3;
        Bary b{0.5, 0.5, 0.5};
        b[i] = 0.0;
        return b;
    }
    throw std::out_of_range("nodal_point: not a nodal DOF");
}

int nodal_component(int j) { return j % 2; }

Bary edge_point(const CellGeometry& geo, int i, double s) {
    Bary b{0.0, 0.0, 0.0};
    const int start = geo.edge_reversed[i] ? (i + 2) % 3 : (i + 1) % 3;
    const int end = geo.edge_reversed[i] ? (i + 1) % 3 : (i + 2) % 3;
    b[start] = 1.0 - s;
    b[end] = s;
    return b;
}

RTLocalBasis::RTLocalBasis(RTOrder order, const CellGeometry& geo) : order_(order), geo_(geo) {
    const int n = rt_dofs_per_cell(order);
    coeff_ = Eigen::MatrixXd::Identity(n, n);
    // DOF matrix of the raw basis; column r holds the DOFs of raw function r
    Eigen::MatrixXd dof_matrix(n, n);
    std::vector<Vec2> raw(n);
    std::vector<double> div(n);
    for (int r = 0; r < n; ++r) {
        dof_matrix.col(r) = apply_dofs([&](const Bary& l) {
            eval_raw(l, raw, div);
            return raw[r];
        });
    }
    coeff_ = dof_matrix.fullPivLu().inverse();
}

void RTLocalBasis::eval_raw(const Bary& l, std::span<Vec2> value, std::span<double> div) const {
    const double h = geo_.diameter;
    const Vec2 xi = (geo_.map(l) - geo_.centroid()) / h;
    if (order_ == RTOrder::RT0) {
        value[0] = Vec2(1.0, 0.0);
        value[1] = Vec2(0.0, 1.0);
        value[2] = xi;
        div[0] = 0.0;
        div[1] = 0.0;
        div[2] = 2.0 / h;
        return;
    }
    value[0] = Vec2(1.0, 0.0);
    value[1] = Vec2(xi.x(), 0.0);
    value[2] = Vec2(xi.y(), 0.0);
    value[3] = Vec2(0.0, 1.0);
    value[4] = Vec2(0.0, xi.x());
    value[5] = Vec2(0.0, xi.y());
    value[6] = xi * xi.x();
    value[7] = xi * xi.y();
    div[0] = 0.0;
    div[1] = 1.0 / h;
    div[2] = 0.0;
    div[3] = 0.0;
    div[4] = 0.0;
    div[5] = 1.0 / h;
    div[6] = 3.0 * xi.x() / h;
    div[7] = 3.0 * xi.y() / h;
}

void RTLocalBasis::eval(const Bary& l, std::span<Vec2> value, std::span<double> div) const {
    const int n = size();
    Vec2 raw[8];
    double raw_div[8];
    eval_raw(l, std::span<Vec2>(raw, n), std::span<double>(raw_div, n));
    for (int j = 0; j < n; ++j) {
        Vec2 v = Vec2::Zero();
        double d = 0.0;
        for (int r = 0; r < n; ++r) {
            v += coeff_(r, j) * raw[r];
            d += coeff_(r, j) * raw_div[r];
        }
        value[j] = v;
        div[j] = d;
    }
}

}  // namespace emapr
