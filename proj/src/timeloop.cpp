#include "emapr/timeloop.hpp"

#include <stdexcept>
#include <string>

namespace emapr {

std::string_view scheme_name(TimeScheme scheme) { return scheme == TimeScheme::BDF2 ? "bdf2" : "cn"; }

TimeScheme parse_scheme(std::string_view name) {
    if (name == "bdf2") return TimeScheme::BDF2;
    if (name == "cn" || name == "crank-nicolson") return TimeScheme::CrankNicolson;
    throw std::invalid_argument("unknown time scheme '" + std::string(name) + "'");
}

std::string_view initial_condition_name(InitialCondition ic) {
    return ic == InitialCondition::Interpolation ? "interpolation" : "stokes";
}

InitialCondition parse_initial_condition(std::string_view name) {
    if (name == "interpolation") return InitialCondition::Interpolation;
    if (name == "stokes") return InitialCondition::StokesProjection;
    throw std::invalid_argument("unknown initial condition '" + std::string(name) + "'");
}

Discretization::Discretization(std::shared_ptr<const Mesh> mesh, ElementKind kind, double alpha, BoundaryMode mode)
    : mode_(mode) {
    ops_ = std::make_shared<const ReconstructionOperators>(build_spaces(std::move(mesh), kind));
    forms_ = assemble_forms(*ops_, alpha);
    convection_ = std::make_unique<ConvectionAssembler>(*ops_);
    constrained_ = dirichlet_dofs(ops_->spaces().velocity, mode);
    norm_ = forms_.A + forms_.M_plain;
}

Eigen::VectorXd Discretization::boundary_values(const VectorField& g) const {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(constrained_.size()));
    if (!g) return values;
    const Eigen::VectorXd full = interpolate(spaces().velocity, g);
    for (std::size_t k = 0; k < constrained_.size(); ++k) values[k] = full[constrained_[k]];
    return values;
}

namespace {

VectorField at_time(const TimeVectorField& f, double t) {
    if (!f) return {};
    return [f, t](const Vec2& x) { return f(t, x); };
}

Eigen::VectorXd load(SimulationState& state, const Discretization& disc, const FlowParameters& params, double t) {
    const int n = disc.spaces().velocity.size();
    if (!params.f) return Eigen::VectorXd::Zero(n);
    if (params.steady_forcing && state.cached_load.size() == n) return state.cached_load;
    Eigen::VectorXd F = assemble_rhs(at_time(params.f, t), disc.ops(), uses_reconstruction(params.form));
    if (params.steady_forcing) state.cached_load = F;
    return F;
}

Eigen::VectorXd constrained_part(const Discretization& disc, const Eigen::VectorXd& u) {
    const auto& c = disc.constrained();
    Eigen::VectorXd out(static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) out[k] = u[c[k]];
    return out;
}

StepProblem base_problem(const SimulationState& state, const Discretization& disc, const FlowParameters& params) {
    StepProblem prob;
    prob.cache = state.solver_cache.get();
    prob.B = disc.forms().B;
    prob.mean_weights = disc.spaces().pressure.mean_weights();
    prob.pressure_constant = disc.spaces().pressure.constant();
    prob.constrained = disc.constrained();
    prob.convection = &disc.convection();
    prob.form = params.form;
    prob.norm_matrix = disc.norm_matrix();
    return prob;
}

void record(SimulationState& state, const NonlinearResult& res, double dt) {
    state.log.push_back({state.t + dt, res.iterations, res.last_increment, res.solution.residual});
}

void crank_nicolson_step(SimulationState& state, const Discretization& disc, const FlowParameters& params,
                         const TimeConfig& config, NonlinearSettings settings) {
    const double dt = config.dt;
    const SparseMatrix& M = disc.mass(params.form);
    StepProblem prob = base_problem(state, disc, params);
    prob.K_linear = (2.0 / dt) * M + params.nu * disc.forms().A;
    prob.rhs_u = load(state, disc, params, state.t + 0.5 * dt) + (2.0 / dt) * (M * state.u_now);
    prob.rhs_p = 0.5 * (disc.forms().B * state.u_now);
    const Eigen::VectorXd g_next = disc.boundary_values(at_time(params.boundary, state.t + dt));
    prob.constrained_values = 0.5 * (g_next + constrained_part(disc, state.u_now));
    prob.increment_scale = 2.0;
    if (settings.method == NonlinearMethod::Extrapolated) prob.beta = 1.5 * state.u_now - 0.5 * state.u_prev;

    const NonlinearResult res = nonlinear_solve(prob, settings, state.u_now);
    record(state, res, dt);
    state.u_prev = state.u_now;
    state.u_now = 2.0 * res.solution.u - state.u_now;
    state.has_prev = true;
    state.p_now = res.solution.p;
    state.p_time = state.t + 0.5 * dt;
    state.t += dt;
    state.step += 1;
}

NonlinearSettings startup_settings(const NonlinearSettings& s) {
    NonlinearSettings out = s;
    if (out.method == NonlinearMethod::Extrapolated) out.method = NonlinearMethod::Picard;
    return out;
}

void check_config(const TimeConfig& config) {
    if (!(config.dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

}  // namespace

SimulationState initialize(const Discretization& disc, const VectorField& u0, InitialCondition ic,
                           const TensorField& grad_u0) {
    SimulationState state;
    const VelocitySpace& V = disc.spaces().velocity;
    state.p_now = Eigen::VectorXd::Zero(disc.spaces().pressure.size());
    if (ic == InitialCondition::Interpolation) {
        state.u_now = interpolate(V, u0);
        return state;
    }
    if (!grad_u0) throw std::invalid_argument("initialize: Stokes projection needs the gradient of u0");

    // a(u0, phi_i) by quadrature on the exact gradient
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(V.size());
    const QuadratureRule& rule = quadrature_rule(kAssemblyDegree);
    std::vector<ShapeValue> phi(static_cast<std::size_t>(V.dofs_per_cell()));
    for (int c = 0; c < disc.mesh().num_cells(); ++c) {
        const CellGeometry& geo = disc.mesh().geometry(c);
        const auto d = V.cell_dofs(c);
        for (int q = 0; q < rule.size(); ++q) {
            eval_velocity_basis(V.kind(), geo, rule.points[q], phi);
            const Mat2 G = grad_u0(geo.map(rule.points[q])) * (rule.weights[q] * geo.area());
            for (int i = 0; i < V.dofs_per_cell(); ++i) rhs[d[i]] += G.cwiseProduct(phi[i].grad).sum();
        }
    }
    SaddleSystem sys;
    sys.K = disc.forms().A;
    sys.B = disc.forms().B;
    sys.mean_weights = disc.spaces().pressure.mean_weights();
    sys.pressure_constant = disc.spaces().pressure.constant();
    sys.rhs_u = rhs;
    sys.rhs_p = Eigen::VectorXd::Zero(disc.spaces().pressure.size());
    sys.constrained = disc.constrained();
    sys.constrained_values = disc.boundary_values(u0);
    state.u_now = solve_linear(sys).u;
    return state;
}

void bdf2_advance(SimulationState& state, const Discretization& disc, const FlowParameters& params,
                  const TimeConfig& config) {
    check_config(config);
    if (!state.has_prev) {
        crank_nicolson_step(state, disc, params, config, startup_settings(config.nonlinear));
        return;
    }
    const double dt = config.dt;
    const SparseMatrix& M = disc.mass(params.form);
    StepProblem prob = base_problem(state, disc, params);
    prob.K_linear = (1.5 / dt) * M + params.nu * disc.forms().A;
    prob.rhs_u = load(state, disc, params, state.t + dt) + (M * (4.0 * state.u_now - state.u_prev)) / (2.0 * dt);
    prob.rhs_p = Eigen::VectorXd::Zero(disc.spaces().pressure.size());
    prob.constrained_values = disc.boundary_values(at_time(params.boundary, state.t + dt));
    prob.beta = 2.0 * state.u_now - state.u_prev;

    NonlinearSettings settings = config.nonlinear;
    settings.method = NonlinearMethod::Extrapolated;
    const NonlinearResult res = nonlinear_solve(prob, settings, state.u_now);
    record(state, res, dt);
    state.u_prev = state.u_now;
    state.u_now = res.solution.u;
    state.p_now = res.solution.p;
    state.p_time = state.t + dt;
    state.t += dt;
    state.step += 1;
}

void crank_nicolson_advance(SimulationState& state, const Discretization& disc, const FlowParameters& params,
                            const TimeConfig& config) {
    check_config(config);
    NonlinearSettings settings = config.nonlinear;
    if (!state.has_prev) settings = startup_settings(settings);
    crank_nicolson_step(state, disc, params, config, settings);
}

void advance(SimulationState& state, const Discretization& disc, const FlowParameters& params, const TimeConfig& config) {
    if (config.scheme == TimeScheme::BDF2) {
        bdf2_advance(state, disc, params, config);
    } else {
        crank_nicolson_advance(state, disc, params, config);
    }
}

}  // namespace emapr
