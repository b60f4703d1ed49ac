// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset, e.g. `emapr_acceptance 1 6 7`.
#include "helpers.hpp"
#include "oracle_compare.hpp"

#include "emapr/bench.hpp"
#include "emapr/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace emapr;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " FAILED[" << what << "]";
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double max_relative_drift(const std::vector<DiagnosticsRecord>& records, double ConservedQuantities::*field) {
    const double ref = records.front().q.*field;
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, std::abs(r.q.*field - ref) / std::abs(ref));
    return worst;
}

double max_momentum(const std::vector<DiagnosticsRecord>& records) {
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, r.q.M.cwiseAbs().maxCoeff());
    return worst;
}

// 1: operator identities on small meshes
void operator_identities(Outcome& out) {
    double div = 0.0, bcons = 0.0, commuting = 0.0, skew = 0.0, jump = 0.0;
    std::mt19937 rng(21);
    for (double perturb : {0.0, 0.2}) {
        auto m = testing::unit_mesh(7, perturb, 6);
        for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
            const Spaces s = build_spaces(m, kind);
            const ReconstructionOperators ops = build_reconstruction(s);
            const Eigen::MatrixXd V0 = testing::discretely_divergence_free_basis(s);
            for (int k = 0; k < V0.cols(); ++k) div = std::max(div, testing::max_reconstructed_divergence(ops, V0.col(k)));

            const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_div_pressure(s));
            bcons = std::max(bcons, (B - testing::reconstructed_divergence(ops)).cwiseAbs().maxCoeff());

            for (int j = 0; j < s.velocity.size(); ++j) {
                const Eigen::VectorXd e = Eigen::VectorXd::Unit(s.velocity.size(), j);
                const auto field = reconstruct(ops, e);
                const Eigen::VectorXd ph = l2_project_divergence(
                    s, CellScalarField([&](int c, const Bary& l) { return evaluate_velocity(s.velocity, e, c, l).grad.trace(); }));
                for (int c = 0; c < m->num_cells(); ++c) {
                    for (const Bary& l : quadrature_rule(4).points) {
                        commuting = std::max(commuting, std::abs(evaluate(ops, field, c, l).div - evaluate_pressure(s, ph, c, l)));
                    }
                }
            }

            const ConvectionAssembler conv(ops);
            for (int trial = 0; trial < 5; ++trial) {
                Eigen::VectorXd a = V0 * testing::random_vector(static_cast<int>(V0.cols()), rng);
                Eigen::VectorXd v = testing::random_vector(s.velocity.size(), rng);
                a /= a.norm();
                v /= v.norm();
                skew = std::max(skew, std::abs(v.dot(conv.assemble(ConvectionForm::Emapr, a) * v)));
            }
            jump = std::max(jump, testing::normal_jump(ops));
        }
    }
    out.detail << "max|div Pi v|=" << sci(div) << " b-consistency=" << sci(bcons) << " commuting=" << sci(commuting)
               << " skew=" << sci(skew) << " normal jump=" << sci(jump);
    out.require(div <= 1e-11, "div");
    out.require(bcons <= 1e-12, "b-consistency");
    out.require(commuting <= 1e-12, "commuting diagram");
    out.require(skew <= 1e-11, "skew-symmetry");
    out.require(jump <= 1e-12, "normal continuity");
}

bool within(const std::vector<std::optional<double>>& rates, double lo, double hi, std::ostringstream& detail,
            const char* label) {
    bool ok = true;
    detail << ' ' << label << '[';
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (i > 0) detail << ',';
        if (!rates[i]) {
            detail << '-';
            ok = false;
            continue;
        }
        detail << fixed(*rates[i]);
        ok = ok && *rates[i] >= lo && *rates[i] <= hi;
    }
    detail << ']';
    return ok;
}

// 2: potential flow convergence on n = 8..64
void convergence(Outcome& out) {
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        for (double alpha : {0.0, 1.0}) {
            BenchmarkConfig c = default_config(ProblemKind::PotentialFlow);
            c.element = kind;
            c.alpha = alpha;
            c.n = 8;
            c.levels = 4;
            c.record_every = 1000000;
            const ConvergenceStudy study = run_convergence(c);
            const std::string tag = std::string(element_name(kind)) + "/a=" + fixed(alpha).substr(0, 1);
            out.detail << ' ' << tag << ':';
            if (kind == ElementKind::BernardiRaugel) {
                out.require(within(study.eoc_L2_u, 1.85, 2.15, out.detail, "L2"), tag + " L2");
                out.require(within(study.eoc_H1_u, 0.9, 1.1, out.detail, "H1"), tag + " H1");
                out.require(within(study.eoc_L2_p, 0.9, 1.1, out.detail, "p"), tag + " p");
            } else {
                out.require(within(study.eoc_L2_u, 2.8, 3.1, out.detail, "L2"), tag + " L2");
                out.require(within(study.eoc_H1_u, 1.9, 2.1, out.detail, "H1"), tag + " H1");
            }
        }
    }
}

// 3: f = 100 grad chi against f = 0, perturbed 32x32 with dt = 0.01
void pressure_robustness(Outcome& out) {
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        BenchmarkConfig c = default_config(ProblemKind::PotentialFlow);
        c.element = kind;
        c.alpha = 0.0;
        c.n = 32;
        c.perturb = 0.25;
        c.seed = 1;
        c.levels = 1;
        c.dt = 0.01;
        c.T = 2.0;
        c.record_every = 50;
        auto mesh = std::make_shared<const Mesh>(make_mesh(c));
        const RunResult plain = run_simulation(c, mesh);
        c.gradient_amplitude = 100.0;
        const RunResult forced = run_simulation(c, mesh);
        c.form = ConvectionForm::Classical;
        const RunResult classical = run_simulation(c, mesh);

        double worst = 0.0;
        for (std::size_t i = 1; i < plain.records.size(); ++i) {
            const double a = plain.records[i].errors.L2_u, b = forced.records[i].errors.L2_u;
            worst = std::max(worst, std::abs(a - b) / a);
        }
        const double emapr_final = forced.records.back().errors.L2_u;
        const double ratio = classical.records.back().errors.L2_u / emapr_final;
        out.detail << ' ' << element_name(kind) << ": records=" << plain.records.size() - 1 << " max rel diff=" << sci(worst)
                   << " L2(t=2) emapr=" << sci(emapr_final) << " classical=" << sci(classical.records.back().errors.L2_u)
                   << " ratio=" << sci(ratio);
        out.require(plain.records.size() == 5, "record times");
        out.require(worst <= 1e-6, std::string(element_name(kind)) + " robustness");
        out.require(ratio >= 100.0, std::string(element_name(kind)) + " classical gap");
    }
}

// 4: Gresho conservation on 24x24 up to T = 5
void gresho_conservation(Outcome& out) {
    struct Case {
        ElementKind kind;
        double alpha;
    };
    double emapr_energy_drift = 0.0;
    for (const Case& k : {Case{ElementKind::BernardiRaugel, 0.0}, Case{ElementKind::P2Bubble, 1.0}}) {
        BenchmarkConfig c = default_config(ProblemKind::Gresho);
        c.element = k.kind;
        c.alpha = k.alpha;
        c.n = 24;
        c.T = 5.0;
        const RunResult r = run_gresho(c);
        const double e = max_relative_drift(r.records, &ConservedQuantities::E_d);
        const double mx = max_relative_drift(r.records, &ConservedQuantities::M_x);
        const double m = max_momentum(r.records);
        if (k.kind == ElementKind::BernardiRaugel) emapr_energy_drift = e;
        const std::string tag(element_name(k.kind));
        out.detail << ' ' << tag << ": E_d drift=" << sci(e) << " M_x drift=" << sci(mx) << " max|M|=" << sci(m);
        out.require(e < 1e-5, tag + " E_d");
        out.require(mx < 1e-5, tag + " M_x");
        out.require(m < 1e-7, tag + " M");
    }

    // classical baseline on the Bernardi-Raugel setup; a breakdown keeps the records so far
    BenchmarkConfig c = default_config(ProblemKind::Gresho);
    c.n = 24;
    c.T = 5.0;
    c.form = ConvectionForm::Classical;
    std::vector<DiagnosticsRecord> records;
    std::string note;
    try {
        run_simulation(c, std::make_shared<const Mesh>(make_mesh(c)), [&](const DiagnosticsRecord& r) { records.push_back(r); });
    } catch (const NonConvergenceError&) {
        note = " (Picard breakdown at t=" + fixed(records.back().t) + ")";
    }
    const double classical = max_relative_drift(records, &ConservedQuantities::E_d);
    out.detail << " classical br: E_d drift=" << sci(classical) << note << " ratio=" << sci(classical / emapr_energy_drift);
    out.require(classical >= 10.0 * emapr_energy_drift, "classical energy gap");
}

// 5: lattice vortex error growth, Emapr against the skew-symmetric form
void lattice_vortex_growth(Outcome& out) {
    BenchmarkConfig c = default_config(ProblemKind::LatticeVortex);
    c.element = ElementKind::P2Bubble;
    c.alpha = 1.0;
    c.n = 16;
    c.T = 2.0;
    c.record_every = 1000;
    auto mesh = std::make_shared<const Mesh>(make_mesh(c));
    const RunResult emapr = run_simulation(c, mesh);
    c.form = ConvectionForm::Skew;
    const RunResult skew = run_simulation(c, mesh);
    const double a = emapr.records.back().errors.L2_u, b = skew.records.back().errors.L2_u;
    out.detail << " p2bubble 16x16: L2(T=2) emapr=" << sci(a) << " skew=" << sci(b) << " ratio=" << sci(a / b);
    out.require(a <= 0.1 * b, "separation");
}

// 6: library matrices against the dense oracle on two cells
void oracle_equivalence(Outcome& out) {
    for (auto kind : {ElementKind::BernardiRaugel, ElementKind::P2Bubble}) {
        for (double alpha : {0.0, 1.0}) {
            const oracle::Comparison cmp = oracle::compare_two_cell(kind, alpha);
            out.detail << ' ' << element_name(kind) << "/a=" << alpha << ": worst=" << sci(cmp.worst());
            out.require(cmp.worst() <= 1e-12, std::string(element_name(kind)) + " entries");
        }
    }
}

// 7: exact Gresho invariants by mesh quadrature on 96x96
void diagnostics_oracles(Outcome& out) {
    using std::numbers::pi;
    // E = pi int u_theta^2 r dr, M_x = -2 pi int u_theta r^2 dr with u_theta = 5r, then 2 - 5r
    const auto e_outer = [](double r) { return 2.0 * r * r - 20.0 * r * r * r / 3.0 + 25.0 * std::pow(r, 4) / 4.0; };
    const auto m_outer = [](double r) { return 2.0 * r * r * r / 3.0 - 5.0 * std::pow(r, 4) / 4.0; };
    const double E = pi * (25.0 * std::pow(0.2, 4) / 4.0 + e_outer(0.4) - e_outer(0.2));
    const double Mx = -2.0 * pi * (5.0 * std::pow(0.2, 4) / 4.0 + m_outer(0.4) - m_outer(0.2));
    const Mesh mesh = build_uniform_square_mesh(96, {-0.5, -0.5, 0.5, 0.5});
    const ExactSolution g = gresho();
    const ConservedQuantities q = field_quantities(mesh, [&](const Vec2& x) { return g.u(0.0, x); }, 8);
    out.detail << " E=" << q.E << " (exact " << E << ", diff " << sci(std::abs(q.E - E)) << ") M_x=" << q.M_x << " (exact "
               << Mx << ", diff " << sci(std::abs(q.M_x - Mx)) << ")";
    out.require(std::abs(E - 0.0837758) < 5e-8 && std::abs(Mx + 0.0586431) < 5e-8, "closed forms");
    out.require(std::abs(q.E - E) <= 1e-6, "E");
    out.require(std::abs(q.M_x - Mx) <= 1e-6, "M_x");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"operator identities", operator_identities},
        {"potential flow convergence", convergence},
        {"pressure robustness", pressure_robustness},
        {"Gresho conservation", gresho_conservation},
        {"lattice vortex error growth", lattice_vortex_growth},
        {"oracle equivalence", oracle_equivalence},
        {"diagnostics oracles", diagnostics_oracles},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " exception: " << e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d %s: %s |%s (%.1f s)\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first,
                    out.detail.str().c_str(), seconds);
        std::fflush(stdout);
        failures += !out.pass;
    }
    return failures == 0 ? 0 : 1;
}
