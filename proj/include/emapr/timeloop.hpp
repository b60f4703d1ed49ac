#pragma once

#include "emapr/solver.hpp"

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

namespace emapr {

using TimeVectorField = std::function<Vec2(double, const Vec2&)>;
using TensorField = std::function<Mat2(const Vec2&)>;

enum class TimeScheme { BDF2, CrankNicolson };

std::string_view scheme_name(TimeScheme scheme);
TimeScheme parse_scheme(std::string_view name);

/// Everything that depends only on mesh, element, alpha and boundary mode.
class Discretization {
public:
    Discretization(std::shared_ptr<const Mesh> mesh, ElementKind kind, double alpha, BoundaryMode mode);

    const Spaces& spaces() const { return ops_->spaces(); }
    const Mesh& mesh() const { return ops_->mesh(); }
    const ReconstructionOperators& ops() const { return *ops_; }
    const FormMatrices& forms() const { return forms_; }
    const ConvectionAssembler& convection() const { return *convection_; }
    const std::vector<int>& constrained() const { return constrained_; }
    BoundaryMode boundary_mode() const { return mode_; }
    double alpha() const { return forms_.alpha; }
    /// A + M_plain, the H1 norm used for nonlinear increments.
    const SparseMatrix& norm_matrix() const { return norm_; }
    const SparseMatrix& mass(ConvectionForm form) const { return uses_reconstruction(form) ? forms_.M_d : forms_.M_plain; }

    /// Canonical interpolant of g restricted to the constrained DOFs (zeros if g is empty).
    Eigen::VectorXd boundary_values(const VectorField& g) const;

private:
    std::shared_ptr<const ReconstructionOperators> ops_;
    FormMatrices forms_;
    std::unique_ptr<ConvectionAssembler> convection_;
    std::vector<int> constrained_;
    BoundaryMode mode_;
    SparseMatrix norm_;
};

struct FlowParameters {
    ConvectionForm form = ConvectionForm::Emapr;
    double nu = 0.0;
    TimeVectorField f;          ///< empty: zero forcing
    bool steady_forcing = false;  ///< f does not depend on t; the load vector is cached
    TimeVectorField boundary;   ///< Dirichlet data; empty: homogeneous
};

struct TimeConfig {
    TimeScheme scheme = TimeScheme::CrankNicolson;
    double dt = 0.01;
    NonlinearSettings nonlinear;
};

struct StepLog {
    double t = 0.0;
    int iterations = 0;
    double last_increment = 0.0;
    double residual = 0.0;
};

struct SimulationState {
    double t = 0.0;
    int step = 0;
    Eigen::VectorXd u_now;
    Eigen::VectorXd u_prev;
    bool has_prev = false;
    Eigen::VectorXd p_now;
    double p_time = 0.0;  ///< CN pressures live at the half step
    std::vector<StepLog> log;
    Eigen::VectorXd cached_load;
    std::shared_ptr<FactorizationCache> solver_cache = std::make_shared<FactorizationCache>();
};

enum class InitialCondition { Interpolation, StokesProjection };

std::string_view initial_condition_name(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view name);

/// Interpolation uses the canonical interpolant. StokesProjection solves
/// a(u_h, v) - b(v, p) = a(u0, v), b(u_h, q) = 0 with u_h = I_h u0 on the
/// constrained DOFs, and needs grad_u0.
SimulationState initialize(const Discretization& disc, const VectorField& u0, InitialCondition ic,
                           const TensorField& grad_u0 = {});

/// (3u^{n+1} - 4u^n + u^{n-1})/(2dt) + nu A u^{n+1} + N(2u^n - u^{n-1}) u^{n+1} - B^T p = F(t^{n+1}).
/// Without a second history level one Picard Crank-Nicolson step is taken instead.
void bdf2_advance(SimulationState& state, const Discretization& disc, const FlowParameters& params,
                  const TimeConfig& config);

/// Midpoint rule on w = (u^{n+1} + u^n)/2 with the nonlinearity solved by
/// Picard or Newton, or frozen at (3u^n - u^{n-1})/2 for the extrapolated method
/// (the first step then falls back to Picard).
void crank_nicolson_advance(SimulationState& state, const Discretization& disc, const FlowParameters& params,
                            const TimeConfig& config);

void advance(SimulationState& state, const Discretization& disc, const FlowParameters& params, const TimeConfig& config);

}  // namespace emapr
