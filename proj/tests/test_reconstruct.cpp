#include "helpers.hpp"
#include "oracle_compare.hpp"

#include "emapr/timeloop.hpp"

#include <doctest.h>

#include <cmath>

using namespace emapr;

TEST_CASE("Bernardi-Raugel bubble RT0 moments") {
    auto m = testing::unit_mesh(2, 0.2);
    const Spaces s = build_spaces(m, ElementKind::BernardiRaugel);
    const ReconstructionOperators ops = build_reconstruction(s);
    const Eigen::MatrixXd P = Eigen::MatrixXd(ops.rt_map());
    for (int c = 0; c < m->num_cells(); ++c) {
        const auto vd = s.velocity.cell_dofs(c);
        const auto xd = s.hdiv.cell_dofs(c);
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) {
                // int_{e_k} b_i . n_e = |e_i| / 6 on its own edge, zero elsewhere
                const double expected = i == k ? m->geometry(c).edge_length[i] / 6.0 : 0.0;
                CHECK(std::abs(P(xd[k], vd[6 + i]) - expected) < 1e-14);
            }
        }
    }
}

TEST_CASE("reconstruction leaves nodal fields alone") {
    auto m = testing::unit_mesh(3, 0.2);
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const Eigen::MatrixXd P1 = Eigen::MatrixXd(ops.nodal_map());
        const int nn = s.velocity.num_nodal();
        CHECK((P1.leftCols(nn) - Eigen::MatrixXd::Identity(nn, nn)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(P1.rightCols(s.velocity.num_bubble()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(Eigen::MatrixXd(ops.rt_map()).leftCols(nn).cwiseAbs().maxCoeff() == 0.0);

        // rigid rotation and constants are reproduced pointwise
        for (const VectorField& g : {VectorField([](const Vec2& x) { return Vec2(-x.y(), x.x()); }),
                                     VectorField([](const Vec2&) { return Vec2(1.0, 0.0); })}) {
            const auto field = reconstruct(ops, nodal_interpolate(s.velocity, g));
            CHECK(field.rt_part.cwiseAbs().maxCoeff() == 0.0);
            for (int c = 0; c < m->num_cells(); ++c) {
                for (const Bary& l : quadrature_rule(4).points) {
                    CHECK((evaluate(ops, field, c, l).value - g(m->geometry(c).map(l))).norm() < 1e-13);
                }
            }
        }
        CHECK_THROWS_AS(reconstruct(ops, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    }
}

TEST_CASE("divergence-free reconstruction, b-consistency, normal continuity") {
    auto m = testing::unit_mesh(3, 0.2);
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        CAPTURE(element_name(kind));
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const Eigen::MatrixXd V0 = testing::discretely_divergence_free_basis(s);
        REQUIRE(V0.cols() > 0);
        double worst = 0.0;
        for (int k = 0; k < V0.cols(); ++k) worst = std::max(worst, testing::max_reconstructed_divergence(ops, V0.col(k)));
        CHECK(worst < 1e-11);
        const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_div_pressure(s));
        CHECK((B - testing::reconstructed_divergence(ops)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(testing::normal_jump(ops) < 1e-12);
    }
}

TEST_CASE("commuting diagram for the divergence projection") {
    auto m = testing::unit_mesh(2, 0.2);
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        for (int j = s.velocity.num_nodal(); j < s.velocity.size(); ++j) {
            const Eigen::VectorXd e = Eigen::VectorXd::Unit(s.velocity.size(), j);
            const Eigen::VectorXd rt = ops.rt_map() * e;
            const Eigen::VectorXd ph = l2_project_divergence(
                s, CellScalarField([&](int c, const Bary& l) { return evaluate_velocity(s.velocity, e, c, l).grad.trace(); }));
            for (int c = 0; c < m->num_cells(); ++c) {
                for (const Bary& l : quadrature_rule(4).points) {
                    CHECK(std::abs(evaluate_rt(ops, rt, c, l).div - evaluate_pressure(s, ph, c, l)) < 1e-12);
                }
            }
        }
        // P_h c = c and P_h is idempotent on W_h
        const Eigen::VectorXd c = l2_project_divergence(s, ScalarField([](const Vec2&) { return 2.5; }));
        CHECK((c - 2.5 * s.pressure.constant()).cwiseAbs().maxCoeff() < 1e-13);
        std::mt19937 rng(9);
        const Eigen::VectorXd p = testing::random_vector(s.pressure.size(), rng);
        const Eigen::VectorXd pp =
            l2_project_divergence(s, CellScalarField([&](int cell, const Bary& l) { return evaluate_pressure(s, p, cell, l); }));
        CHECK((pp - p).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("seminorm_star") {
    auto m = testing::unit_mesh(2, 0.1);
    const Spaces s = build_spaces(m, ElementKind::BernardiRaugel);
    const ReconstructionOperators ops = build_reconstruction(s);
    std::mt19937 rng(2);
    Eigen::VectorXd v = testing::random_vector(s.velocity.size(), rng);
    Eigen::VectorXd nodal = v;
    nodal.tail(s.velocity.num_bubble()).setZero();
    CHECK(seminorm_star(ops, nodal) == 0.0);
    CHECK(seminorm_star(ops, -3.0 * v) == doctest::Approx(3.0 * seminorm_star(ops, v)).epsilon(1e-14));
    CHECK(seminorm_star(ops, v) > 0.0);
}

TEST_CASE("seminorm_star of one bubble against the dense oracle") {
    std::vector<oracle::V2> verts;
    std::vector<std::array<int, 3>> cells;
    oracle::two_cell_mesh(verts, cells);
    auto m = std::make_shared<const Mesh>(verts, cells);
    const oracle::Problem ref(verts, cells, oracle::Element::BR);
    const Spaces s = build_spaces(m, ElementKind::BernardiRaugel);
    const ReconstructionOperators ops = build_reconstruction(s);
    // the shared edge {1, 2}: bubble index in the oracle and in the library
    int ref_index = -1;
    for (int i = 0; i < ref.num_velocity(); ++i) {
        const auto& b = ref.basis()[i];
        if (b.type == oracle::Basis::FaceBubble && ref.edges()[b.edge][0] + ref.edges()[b.edge][1] == 3 &&
            ref.edges()[b.edge][0] * ref.edges()[b.edge][1] == 2) ref_index = i;
    }
    int lib_index = -1;
    for (int e = 0; e < m->num_edges(); ++e) {
        if (m->edge(e) == std::array<int, 2>{1, 2}) lib_index = s.velocity.num_nodal() + e;
    }
    REQUIRE(ref_index >= 0);
    REQUIRE(lib_index >= 0);
    double sum = 0.0;
    for (int c = 0; c < 2; ++c) {
        const auto& cv = cells[c];
        double norm2 = 0.0;
        for (const auto& p : oracle::triangle_rule(verts[cv[0]], verts[cv[1]], verts[cv[2]], 8)) {
            norm2 += p.w * ref.reconstruction_rt(ref_index, c, p.x).squaredNorm();
        }
        sum += norm2 / std::pow(m->geometry(c).diameter, 2);
    }
    CHECK(seminorm_star(ops, Eigen::VectorXd::Unit(s.velocity.size(), lib_index)) ==
          doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
}

TEST_CASE("consistency order and approximation of Pi_h^R") {
    // (g, v_h - Pi_h v_h) for the Stokes projection v_h of a smooth solenoidal field
    const VectorField u0 = [](const Vec2& x) {
        const double sx = std::sin(M_PI * x.x()), sy = std::sin(M_PI * x.y());
        return Vec2(M_PI * sx * sx * std::sin(2 * M_PI * x.y()), -M_PI * sy * sy * std::sin(2 * M_PI * x.x()));
    };
    const TensorField grad_u0 = [](const Vec2& x) {
        const double sx = std::sin(M_PI * x.x()), sy = std::sin(M_PI * x.y());
        const double s2x = std::sin(2 * M_PI * x.x()), s2y = std::sin(2 * M_PI * x.y());
        Mat2 g;
        g << M_PI * M_PI * s2x * s2y, 2 * M_PI * M_PI * sx * sx * std::cos(2 * M_PI * x.y()),
            -2 * M_PI * M_PI * sy * sy * std::cos(2 * M_PI * x.x()), -M_PI * M_PI * s2y * s2x;
        return g;
    };
    const VectorField g = [](const Vec2& x) { return Vec2(std::cos(x.x() + 2 * x.y()), x.x() * x.x() - x.y()); };
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        CAPTURE(element_name(kind));
        std::vector<double> pairing, ratio, h;
        for (int n : {4, 8, 16, 32}) {
            auto m = testing::unit_mesh(n);
            const Discretization disc(m, kind, 0.0, BoundaryMode::Full);
            const Eigen::VectorXd v = initialize(disc, u0, InitialCondition::StokesProjection, grad_u0).u_now;
            const auto pi = reconstruct(disc.ops(), v);
            const Eigen::VectorXd rt = disc.ops().rt_map() * v;
            const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
            double pair = 0.0, worst = 0.0;
            for (int c = 0; c < m->num_cells(); ++c) {
                const CellGeometry& geo = m->geometry(c);
                double rt_max = 0.0, grad_max = 0.0;
                for (int q = 0; q < rule.size(); ++q) {
                    const Bary& l = rule.points[q];
                    const ShapeValue vh = evaluate_velocity(disc.spaces().velocity, v, c, l);
                    pair += rule.weights[q] * geo.area() * g(geo.map(l)).dot(vh.value - evaluate(disc.ops(), pi, c, l).value);
                    rt_max = std::max(rt_max, evaluate_rt(disc.ops(), rt, c, l).value.norm());
                    grad_max = std::max(grad_max, vh.grad.norm());
                }
                if (grad_max > 0.0) worst = std::max(worst, rt_max / (geo.diameter * grad_max));
            }
            pairing.push_back(std::abs(pair));
            ratio.push_back(worst);
            h.push_back(m->max_h());
        }
        const int k = element_order(kind);
        const double slope = std::log(pairing[2] / pairing[3]) / std::log(h[2] / h[3]);
        CHECK(slope >= k - 0.2);
        CHECK(ratio.back() <= 2.0 * ratio.front());
    }
}
