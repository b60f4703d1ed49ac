#include "helpers.hpp"

#include "emapr/diagnostics.hpp"

#include <doctest.h>

#include <cmath>

using namespace emapr;

namespace {

constexpr ElementKind kKinds[] = {ElementKind::BernardiRaugel, ElementKind::P2Bubble};

Eigen::VectorXd random_divergence_free(const Eigen::MatrixXd& V0, std::mt19937& rng) {
    return V0 * testing::random_vector(static_cast<int>(V0.cols()), rng);
}

double bilinear(const SparseMatrix& N, const Eigen::VectorXd& test, const Eigen::VectorXd& trial) {
    return test.dot(N * trial);
}

}  // namespace

TEST_CASE("stiffness on the reference triangle") {
    auto m = std::make_shared<const Mesh>(std::vector<Vec2>{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)},
                                          std::vector<std::array<int, 3>>{{0, 1, 2}});
    const Spaces s = build_spaces(m, ElementKind::BernardiRaugel);
    const Eigen::MatrixXd A = Eigen::MatrixXd(assemble_gradgrad(s.velocity));
    // |grad l0|^2 = 2 on an area of 1/2
    CHECK(A(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(A(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(A(0, 2) == doctest::Approx(-0.5).epsilon(1e-14));

    // b(b_i, 1) = |e_i| / 6 for the face bubbles of a single cell
    const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_div_pressure(s));
    for (int e = 0; e < m->num_edges(); ++e) {
        const double length = (m->vertex(m->edge(e)[0]) - m->vertex(m->edge(e)[1])).norm();
        CHECK(B(0, s.velocity.num_nodal() + e) == doctest::Approx(length / 6.0).epsilon(1e-14));
    }
}

TEST_CASE("stiffness and divergence invariants") {
    auto m = testing::unit_mesh(4, 0.2);
    std::mt19937 rng(1);
    for (auto kind : kKinds) {
        const Spaces s = build_spaces(m, kind);
        const SparseMatrix A = assemble_gradgrad(s.velocity);
        CHECK(testing::max_abs(SparseMatrix(A - SparseMatrix(A.transpose()))) < 1e-14);
        const Eigen::VectorXd one = nodal_interpolate(s.velocity, [](const Vec2&) { return Vec2(1.0, -2.0); });
        CHECK((A * one).cwiseAbs().maxCoeff() < 1e-12);

        // b(v, 1) = 0 for v vanishing on the boundary
        Eigen::VectorXd v = testing::random_vector(s.velocity.size(), rng);
        for (int d : dirichlet_dofs(s.velocity, BoundaryMode::Full)) v[d] = 0.0;
        const SparseMatrix B = assemble_div_pressure(s);
        CHECK(std::abs(s.pressure.constant().dot(B * v)) < 1e-13);
    }
}

TEST_CASE("d_h mass") {
    auto m = testing::unit_mesh(3, 0.2);
    std::mt19937 rng(5);
    for (auto kind : kKinds) {
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const int nn = s.velocity.num_nodal();
        for (double alpha : {0.0, 1.0, 10.0}) {
            const FormMatrices f = assemble_forms(ops, alpha);
            const Eigen::MatrixXd Md = Eigen::MatrixXd(f.M_d);
            const Eigen::MatrixXd Mp = Eigen::MatrixXd(f.M_plain);
            CHECK((Md.topLeftCorner(nn, nn) - Mp.topLeftCorner(nn, nn)).cwiseAbs().maxCoeff() < 1e-15);
            CHECK((Md - Md.transpose()).cwiseAbs().maxCoeff() < 1e-15);
            for (int trial = 0; trial < 5; ++trial) {
                const Eigen::VectorXd u = testing::random_vector(s.velocity.size(), rng);
                const ConservedQuantities q = conserved_quantities(ops, u, alpha);
                CHECK(q.E <= q.E_d + 1e-14);
                CHECK(q.E_d == doctest::Approx(0.5 * u.dot(Md * u)).epsilon(1e-12));
            }
        }
        CHECK_THROWS_AS(assemble_dh_mass(ops, -0.5), std::invalid_argument);
    }
}

TEST_CASE("energy neutrality of the convection forms") {
    auto m = testing::unit_mesh(4, 0.15);
    std::mt19937 rng(11);
    for (auto kind : kKinds) {
        CAPTURE(element_name(kind));
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const ConvectionAssembler conv(ops);
        const Eigen::MatrixXd V0 = testing::discretely_divergence_free_basis(s);
        const auto fixed = dirichlet_dofs(s.velocity, BoundaryMode::Full);
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::VectorXd beta = testing::random_vector(s.velocity.size(), rng);
            Eigen::VectorXd v = testing::random_vector(s.velocity.size(), rng);
            for (int d : fixed) v[d] = 0.0;
            const double scale = beta.norm() * v.squaredNorm();
            // skew-symmetric for any advecting field
            CHECK(std::abs(bilinear(conv.assemble(ConvectionForm::Skew, beta), v, v)) < 1e-12 * scale);
            CHECK(std::abs(bilinear(conv.assemble(ConvectionForm::RotReco, beta), v, v)) < 1e-12 * scale);
            // EMAC when advecting field and trial coincide
            CHECK(std::abs(bilinear(conv.assemble(ConvectionForm::Emac, v), v, v)) < 1e-12 * v.norm() * v.squaredNorm());
            // Emapr for advecting fields in V_h^0 and any trial
            const Eigen::VectorXd a = random_divergence_free(V0, rng);
            const Eigen::VectorXd w = testing::random_vector(s.velocity.size(), rng);
            CHECK(std::abs(bilinear(conv.assemble(ConvectionForm::Emapr, a), w, w)) < 1e-12 * a.norm() * w.squaredNorm());
            // the classical form is not neutral in general
            CHECK(std::abs(bilinear(conv.assemble(ConvectionForm::Classical, beta), v, v)) > 1e-8 * scale);
        }
        CHECK(testing::max_abs(conv.assemble(ConvectionForm::Classical, Eigen::VectorXd::Zero(s.velocity.size()))) == 0.0);
    }
}

TEST_CASE("momentum and angular momentum of the Emapr form") {
    auto m = std::make_shared<const Mesh>(
        perturb_interior_vertices(build_uniform_square_mesh(5, {-1.0, -1.0, 1.0, 1.0}), 0.15, 8));
    std::mt19937 rng(13);
    for (auto kind : kKinds) {
        CAPTURE(element_name(kind));
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const ConvectionAssembler conv(ops);
        const Eigen::MatrixXd V0 = testing::discretely_divergence_free_basis(s);
        const Eigen::VectorXd ex = nodal_interpolate(s.velocity, [](const Vec2&) { return Vec2(1.0, 0.0); });
        const Eigen::VectorXd ey = nodal_interpolate(s.velocity, [](const Vec2&) { return Vec2(0.0, 1.0); });
        const Eigen::VectorXd rot = nodal_interpolate(s.velocity, [](const Vec2& x) { return Vec2(x.y(), -x.x()); });
        for (int trial = 0; trial < 3; ++trial) {
            const Eigen::VectorXd u = random_divergence_free(V0, rng);
            const SparseMatrix N = conv.assemble(ConvectionForm::Emapr, u);
            const double scale = u.norm() * u.norm();
            CHECK(std::abs(bilinear(N, ex, u)) < 1e-10 * scale);
            CHECK(std::abs(bilinear(N, ey, u)) < 1e-10 * scale);
            CHECK(std::abs(bilinear(N, rot, u)) < 1e-10 * scale);
            // the rotational form carries the Lamb vector and loses momentum
            const SparseMatrix R = conv.assemble(ConvectionForm::RotReco, u);
            CHECK(std::abs(bilinear(R, ex, u)) + std::abs(bilinear(R, ey, u)) > 1e-6 * scale);
        }
    }
}

TEST_CASE("advection derivative is the linearization of the convection term") {
    auto m = testing::unit_mesh(3, 0.2);
    std::mt19937 rng(3);
    for (auto kind : kKinds) {
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const ConvectionAssembler conv(ops);
        const Eigen::VectorXd u = testing::random_vector(s.velocity.size(), rng);
        const Eigen::VectorXd du = testing::random_vector(s.velocity.size(), rng);
        for (auto form : {ConvectionForm::Classical, ConvectionForm::Skew, ConvectionForm::Emac, ConvectionForm::ConvReco,
                          ConvectionForm::RotReco, ConvectionForm::Emapr}) {
            CAPTURE(form_name(form));
            // every form is linear in the advecting slot, so N(beta) u = Nhat(u) beta exactly
            const Eigen::VectorXd lhs = conv.assemble(form, du) * u;
            const Eigen::VectorXd rhs = conv.assemble_advection_derivative(form, u) * du;
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + lhs.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("load vector") {
    auto m = testing::unit_mesh(4, 0.15);
    const VectorField grad_chi = [](const Vec2& x) {
        return Vec2(3.0 * x.x() * x.x() + std::cos(x.y()), -x.x() * std::sin(x.y()));
    };
    const VectorField smooth = [](const Vec2& x) { return Vec2(std::exp(x.y()), x.x() * x.y()); };
    for (auto kind : kKinds) {
        const Spaces s = build_spaces(m, kind);
        const ReconstructionOperators ops = build_reconstruction(s);
        const Eigen::MatrixXd V0 = testing::discretely_divergence_free_basis(s);
        // gradient forcing is invisible to discretely divergence-free test functions
        const Eigen::VectorXd g = assemble_rhs(grad_chi, ops, true);
        CHECK((V0.transpose() * g).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((V0.transpose() * assemble_rhs(grad_chi, ops, false)).cwiseAbs().maxCoeff() > 1e-6);
        CHECK(assemble_rhs([](const Vec2&) { return Vec2::Zero().eval(); }, ops, true).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXd fr = assemble_rhs(smooth, ops, true);
        const Eigen::VectorXd fp = assemble_rhs(smooth, ops, false);
        const int nn = s.velocity.num_nodal();
        CHECK((fr.head(nn) - fp.head(nn)).cwiseAbs().maxCoeff() < 1e-15);
    }
}
