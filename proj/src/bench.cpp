#include "emapr/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace emapr {

std::string_view problem_name(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::PotentialFlow: return "potential_flow";
        case ProblemKind::Gresho: return "gresho";
        case ProblemKind::LatticeVortex: return "lattice_vortex";
        case ProblemKind::Manufactured: return "manufactured";
    }
    return "unknown";
}

ProblemKind parse_problem(std::string_view name) {
    for (auto k : {ProblemKind::PotentialFlow, ProblemKind::Gresho, ProblemKind::LatticeVortex,
                   ProblemKind::Manufactured}) {
        if (problem_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

BenchmarkConfig default_config(ProblemKind problem) {
    BenchmarkConfig c;
    c.problem = problem;
    switch (problem) {
        case ProblemKind::PotentialFlow:
            c.nu = 5e-4;
            c.dt = 1e-3;
            c.T = 0.1;
            c.n = 8;
            c.levels = 4;
            c.scheme = TimeScheme::BDF2;
            c.nonlinear.method = NonlinearMethod::Extrapolated;
            c.record_every = 100;
            break;
        case ProblemKind::Gresho:
            c.nu = 0.0;
            c.dt = 0.01;
            c.T = 10.0;
            c.n = 48;
            c.scheme = TimeScheme::CrankNicolson;
            c.nonlinear.method = NonlinearMethod::Picard;
            c.initial = InitialCondition::StokesProjection;
            c.record_every = 10;
            break;
        case ProblemKind::LatticeVortex:
            c.nu = 1e-5;
            c.dt = 1e-3;
            c.T = 10.0;
            c.n = 64;
            c.alpha = 1.0;
            c.scheme = TimeScheme::CrankNicolson;
            c.nonlinear.method = NonlinearMethod::Extrapolated;
            c.record_every = 100;
            break;
        case ProblemKind::Manufactured:
            c.nu = 1.0;
            c.dt = 0.01;
            c.T = 0.5;
            c.n = 8;
            c.scheme = TimeScheme::CrankNicolson;
            c.nonlinear.method = NonlinearMethod::Newton;
            c.record_every = 10;
            break;
    }
    return c;
}

void validate(const BenchmarkConfig& c) {
    if (!(c.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    if (!(c.nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
    if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(c.T >= c.dt)) throw std::invalid_argument("T must be >= dt");
    if (c.n < 1) throw std::invalid_argument("n must be >= 1");
    if (c.levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (c.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    if (!(c.perturb >= 0.0 && c.perturb < 0.3)) throw std::invalid_argument("perturb must be in [0, 0.3)");
    if (!(c.nonlinear.tolerance > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (c.nonlinear.max_iterations < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (c.problem != ProblemKind::PotentialFlow && c.gradient_amplitude != 0.0) {
        throw std::invalid_argument("f_amplitude only applies to potential_flow");
    }
}

std::string resolve_output_dir(const BenchmarkConfig& config) {
    if (const char* env = std::getenv("EMAPR_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return config.output_dir;
}

ExactSolution exact_solution(const BenchmarkConfig& c) {
    switch (c.problem) {
        case ProblemKind::PotentialFlow: return potential_flow(c.nu, c.gradient_amplitude);
        case ProblemKind::Gresho: {
            ExactSolution e = gresho();
            e.nu = c.nu;
            return e;
        }
        case ProblemKind::LatticeVortex: return lattice_vortex(c.nu);
        case ProblemKind::Manufactured: return manufactured(c.nu);
    }
    throw std::invalid_argument("exact_solution: unknown problem");
}

BoundaryMode boundary_mode(ProblemKind problem) {
    return problem == ProblemKind::Gresho ? BoundaryMode::NoPenetration : BoundaryMode::Full;
}

Mesh make_mesh(const BenchmarkConfig& c, int level) {
    Mesh mesh;
    if (!c.mesh_file.empty()) {
        std::ifstream in(c.mesh_file);
        if (!in) throw std::runtime_error("cannot open mesh file '" + c.mesh_file + "'");
        mesh = read_mesh(in);
        for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    } else {
        mesh = build_uniform_square_mesh(c.n << level, exact_solution(c).domain);
    }
    if (c.perturb > 0.0) mesh = perturb_interior_vertices(mesh, c.perturb, c.seed + static_cast<std::uint64_t>(level));
    return mesh;
}

namespace {

DiagnosticsRecord make_record(const Discretization& disc, const BenchmarkConfig& c, const ExactSolution& exact,
                              const SimulationState& state) {
    DiagnosticsRecord r;
    r.t = state.t;
    r.q = conserved_quantities(disc.ops(), state.u_now, c.alpha, uses_reconstruction(c.form));
    // no pressure exists before the first step
    const Eigen::VectorXd no_pressure;
    r.errors = error_norms(disc.ops(), state.u_now, state.step > 0 ? state.p_now : no_pressure, exact, state.t,
                           state.p_time);
    r.seminorm_star = seminorm_star(disc.ops(), state.u_now);
    return r;
}

}  // namespace

RunResult run_simulation(const BenchmarkConfig& c, std::shared_ptr<const Mesh> mesh, const RecordCallback& on_record) {
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    const ExactSolution exact = exact_solution(c);
    Discretization disc(mesh, c.element, c.alpha, boundary_mode(c.problem));

    FlowParameters params;
    params.form = c.form;
    params.nu = c.nu;
    params.f = exact.f;
    params.steady_forcing = exact.steady_forcing;
    if (boundary_mode(c.problem) == BoundaryMode::Full) params.boundary = exact.u;

    TimeConfig tc;
    tc.scheme = c.scheme;
    tc.dt = c.dt;
    tc.nonlinear = c.nonlinear;

    const auto u0 = [&exact](const Vec2& x) { return exact.u(0.0, x); };
    TensorField grad_u0;
    if (exact.grad_u) grad_u0 = [&exact](const Vec2& x) { return exact.grad_u(0.0, x); };
    SimulationState state = initialize(disc, u0, c.initial, grad_u0);

    RunResult out;
    out.num_cells = mesh->num_cells();
    out.velocity_dofs = disc.spaces().velocity.size();
    out.pressure_dofs = disc.spaces().pressure.size();
    out.h = mesh->max_h();
    auto emit = [&] {
        out.records.push_back(make_record(disc, c, exact, state));
        if (on_record) on_record(out.records.back());
    };
    emit();
    const long steps = std::lround(c.T / c.dt);
    for (long s = 1; s <= steps; ++s) {
        advance(state, disc, params, tc);
        state.t = static_cast<double>(s) * c.dt;  // no accumulated rounding in t
        if (s % c.record_every == 0 || s == steps) emit();
    }
    out.steps = std::move(state.log);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

ConvergenceStudy run_convergence(const BenchmarkConfig& c) {
    validate(c);
    ConvergenceStudy study;
    std::vector<std::pair<double, double>> l2, l2pi, h1, lp;
    for (int level = 0; level < c.levels; ++level) {
        auto mesh = std::make_shared<const Mesh>(make_mesh(c, level));
        study.levels.push_back(run_simulation(c, mesh));
        const RunResult& r = study.levels.back();
        const ErrorBundle& e = r.records.back().errors;
        l2.emplace_back(r.h, e.L2_u);
        l2pi.emplace_back(r.h, e.L2_Pu);
        h1.emplace_back(r.h, e.H1_u);
        lp.emplace_back(r.h, e.L2_p);
    }
    study.eoc_L2_u = eoc(l2);
    study.eoc_L2_Pu = eoc(l2pi);
    study.eoc_H1_u = eoc(h1);
    study.eoc_L2_p = eoc(lp);
    return study;
}

ConvergenceStudy run_potential_flow(const BenchmarkConfig& c) {
    if (c.problem != ProblemKind::PotentialFlow) throw std::invalid_argument("run_potential_flow: wrong problem");
    return run_convergence(c);
}

RunResult run_gresho(const BenchmarkConfig& c) {
    if (c.problem != ProblemKind::Gresho) throw std::invalid_argument("run_gresho: wrong problem");
    return run_simulation(c, std::make_shared<const Mesh>(make_mesh(c)));
}

RunResult run_lattice_vortex(const BenchmarkConfig& c) {
    if (c.problem != ProblemKind::LatticeVortex) throw std::invalid_argument("run_lattice_vortex: wrong problem");
    return run_simulation(c, std::make_shared<const Mesh>(make_mesh(c)));
}

void write_records_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    write_csv_header(out);
    for (const auto& r : records) write_csv_row(out, r);
}

void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study) {
    out << "level,h,cells,dofs_u,dofs_p,err_L2_u,eoc_L2_u,err_L2_Pu,eoc_L2_Pu,err_H1_u,eoc_H1_u,err_L2_p,eoc_L2_p,"
           "err_L2_Php\n";
    auto rate = [](const std::vector<std::optional<double>>& r, std::size_t level) {
        if (level == 0 || !r[level - 1]) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *r[level - 1]);
        return std::string(buf);
    };
    for (std::size_t l = 0; l < study.levels.size(); ++l) {
        const RunResult& r = study.levels[l];
        const ErrorBundle& e = r.records.back().errors;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%zu,%.6e,%d,%d,%d,", l, r.h, r.num_cells, r.velocity_dofs, r.pressure_dofs);
        out << buf;
        std::snprintf(buf, sizeof buf, "%.6e,", e.L2_u);
        out << buf << rate(study.eoc_L2_u, l) << ',';
        std::snprintf(buf, sizeof buf, "%.6e,", e.L2_Pu);
        out << buf << rate(study.eoc_L2_Pu, l) << ',';
        std::snprintf(buf, sizeof buf, "%.6e,", e.H1_u);
        out << buf << rate(study.eoc_H1_u, l) << ',';
        std::snprintf(buf, sizeof buf, "%.6e,", e.L2_p);
        out << buf << rate(study.eoc_L2_p, l) << ',';
        std::snprintf(buf, sizeof buf, "%.6e\n", e.L2_Php);
        out << buf;
    }
}

}  // namespace emapr
