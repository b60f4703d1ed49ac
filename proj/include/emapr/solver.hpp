#pragma once

#include "emapr/forms.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string_view>
#include <vector>

namespace emapr {

/**
 * One linear saddle-point step
 *
 *   K u - B^T p = rhs_u
 *  -B u         = -rhs_p
 *
 * with u fixed to constrained_values on the constrained DOFs and p normalized
 * to m . p = 0. The pressure is pinned at the first DOF carrying the constant,
 * which drops one continuity row; that row is implied by the others whenever
 * the boundary flux is compatible with rhs_p.
 */
struct SaddleSystem {
    SparseMatrix K;
    SparseMatrix B;
    Eigen::VectorXd mean_weights;
    Eigen::VectorXd pressure_constant;  ///< coefficients of p = 1
    Eigen::VectorXd rhs_u;
    Eigen::VectorXd rhs_p;
    std::vector<int> constrained;         ///< sorted
    Eigen::VectorXd constrained_values;   ///< one value per constrained DOF
};

struct SaddleSolution {
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    double multiplier = 0.0;  ///< 1.(B u - rhs_p) / |Omega|: zero for compatible boundary flux
    double residual = 0.0;  ///< relative residual of the constrained system
};

/// Minimal factor/solve interface so an iterative backend can be slotted in later.
class LinearSolver {
public:
    virtual ~LinearSolver() = default;
    virtual void factor(const SparseMatrix& matrix) = 0;
    virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
    virtual std::string_view name() const = 0;
};

/// UMFPACK, or Eigen's SparseLU once UMFPACK has missed the residual limit in this process.
std::unique_ptr<LinearSolver> make_direct_solver();

/**
 * Keeps the most recent factorization. A later system of the same size is
 * first solved by iterative refinement preconditioned with the old factors
 * and refactored only when that contracts poorly. Time steps change K by a
 * small convection increment, so most steps need no new factorization.
 */
class FactorizationCache {
public:
    int factorizations() const { return factorizations_; }
    int reused() const { return reused_; }

private:
    friend SaddleSolution solve_linear(const SaddleSystem&, FactorizationCache*);
    std::unique_ptr<LinearSolver> solver_;
    Eigen::Index size_ = 0;
    int factorizations_ = 0;
    int reused_ = 0;
};

/// Throws SolverError when the factorization fails or the relative residual exceeds 1e-10
/// with both backends.
SaddleSolution solve_linear(const SaddleSystem& system, FactorizationCache* cache = nullptr);

enum class NonlinearMethod { Picard, Newton, Extrapolated };

std::string_view method_name(NonlinearMethod method);
NonlinearMethod parse_method(std::string_view name);

struct NonlinearSettings {
    NonlinearMethod method = NonlinearMethod::Picard;
    double tolerance = 1e-6;  ///< on the H1 norm of the velocity increment
    int max_iterations = 50;
};

/// K_linear w + N(w) w - B^T p = rhs_u, B w = rhs_p, plus constraints.
struct StepProblem {
    SparseMatrix K_linear;
    SparseMatrix B;
    Eigen::VectorXd mean_weights;
    Eigen::VectorXd pressure_constant;
    Eigen::VectorXd rhs_u;
    Eigen::VectorXd rhs_p;
    std::vector<int> constrained;
    Eigen::VectorXd constrained_values;

    const ConvectionAssembler* convection = nullptr;  ///< null: Stokes step
    ConvectionForm form = ConvectionForm::Emapr;
    Eigen::VectorXd beta;  ///< advecting field for NonlinearMethod::Extrapolated

    FactorizationCache* cache = nullptr;

    SparseMatrix norm_matrix;     ///< A + M_plain
    double increment_scale = 1.0;  ///< maps increments of the unknown to increments of the velocity
};

struct NonlinearResult {
    SaddleSolution solution;
    int iterations = 0;
    double last_increment = 0.0;
    std::vector<double> increments;
};

/// Throws NonConvergenceError after max_iterations without meeting the tolerance.
NonlinearResult nonlinear_solve(const StepProblem& problem, const NonlinearSettings& settings,
                                const Eigen::VectorXd& initial_guess);

}  // namespace emapr
