#include "emapr/solver.hpp"

#include "emapr/errors.hpp"

#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

namespace emapr {

namespace {

class UmfpackSolver final : public LinearSolver {
public:
    UmfpackSolver() {
        lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
        lu_.umfpackControl()(UMFPACK_IRSTEP) = 0;  // refinement is done by the caller
    }
    void factor(const SparseMatrix& matrix) override {
        // UmfPackLU keeps pointers into the factored matrix for its solves
        matrix_ = matrix;
        lu_.compute(matrix_);
        if (lu_.info() != Eigen::Success) throw SolverError("UMFPACK factorization failed (singular system?)");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
        Eigen::VectorXd x = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success) throw SolverError("UMFPACK solve failed");
        return x;
    }
    std::string_view name() const override { return "umfpack"; }

private:
    SparseMatrix matrix_;
    Eigen::UmfPackLU<SparseMatrix> lu_;
};

class SparseLUSolver final : public LinearSolver {
public:
    void factor(const SparseMatrix& matrix) override {
        lu_.compute(matrix);
        if (lu_.info() != Eigen::Success) throw SolverError("SparseLU factorization failed: " + lu_.lastErrorMessage());
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
        // Eigen's SparseLU::solve is not const-qualified
        return const_cast<Eigen::SparseLU<SparseMatrix>&>(lu_).solve(rhs);
    }
    std::string_view name() const override { return "sparselu"; }

private:
    Eigen::SparseLU<SparseMatrix> lu_;
};

constexpr double kResidualTarget = 1e-12;
constexpr double kResidualLimit = 1e-10;
constexpr int kRefinementSteps = 3;
constexpr int kReuseIterations = 6;
constexpr double kContraction = 0.25;

std::atomic<bool> umfpack_disabled{false};

struct Attempt {
    Eigen::VectorXd x;
    double residual;
};

// x <- x + F^{-1}(b - S x) with factors F of S or of a nearby matrix; stops on
// poor contraction
Attempt refine_with(const LinearSolver& solver, const SparseMatrix& S, const Eigen::VectorXd& b, int max_steps) {
    Eigen::VectorXd x = solver.solve(b);
    const double bnorm = b.norm();
    auto relative = [&](const Eigen::VectorXd& r) { return bnorm > 0.0 ? r.norm() / bnorm : r.norm(); };
    Eigen::VectorXd r = b - S * x;
    double res = relative(r);
    for (int step = 0; step < max_steps && res > kResidualTarget && std::isfinite(res); ++step) {
        Eigen::VectorXd next = x + solver.solve(r);
        Eigen::VectorXd r_next = b - S * next;
        const double res_next = relative(r_next);
        if (!(res_next < kContraction * res)) break;
        x = std::move(next);
        r = std::move(r_next);
        res = res_next;
    }
    return {std::move(x), res};
}

Attempt solve_refined(LinearSolver& solver, const SparseMatrix& S, const Eigen::VectorXd& b) {
    solver.factor(S);
    return refine_with(solver, S, b, kRefinementSteps);
}

bool acceptable(double res) { return std::isfinite(res) && res <= kResidualLimit; }

}  // namespace

std::unique_ptr<LinearSolver> make_direct_solver() {
    if (umfpack_disabled.load()) return std::make_unique<SparseLUSolver>();
    return std::make_unique<UmfpackSolver>();
}

SaddleSolution solve_linear(const SaddleSystem& s, FactorizationCache* cache) {
    const int nu = static_cast<int>(s.K.rows());
    const int np = static_cast<int>(s.B.rows());
    const int n = nu + np;
    if (s.K.cols() != nu || s.B.cols() != nu || s.rhs_u.size() != nu || s.rhs_p.size() != np ||
        s.mean_weights.size() != np || s.pressure_constant.size() != np ||
        s.constrained_values.size() != static_cast<Eigen::Index>(s.constrained.size())) {
        throw std::invalid_argument("solve_linear: inconsistent block sizes");
    }
    int pinned = -1;
    for (int q = 0; q < np && pinned < 0; ++q) {
        if (s.pressure_constant[q] != 0.0) pinned = q;
    }
    if (np > 0 && pinned < 0) throw std::invalid_argument("solve_linear: pressure_constant is zero");

    std::vector<char> fixed(nu, 0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nu);
    for (std::size_t k = 0; k < s.constrained.size(); ++k) {
        fixed[s.constrained[k]] = 1;
        g[s.constrained[k]] = s.constrained_values[k];
    }

    Eigen::VectorXd b(n);
    b.head(nu) = s.rhs_u;
    b.segment(nu, np) = -s.rhs_p;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(s.K.nonZeros() + 2 * s.B.nonZeros() + nu + 1));
    for (int j = 0; j < nu; ++j) {
        for (SparseMatrix::InnerIterator it(s.K, j); it; ++it) {
            const int i = static_cast<int>(it.row());
            if (fixed[i]) continue;
            if (fixed[j]) {
                b[i] -= it.value() * g[j];
            } else {
                entries.emplace_back(i, j, it.value());
            }
        }
        for (SparseMatrix::InnerIterator it(s.B, j); it; ++it) {
            const int q = static_cast<int>(it.row());
            if (fixed[j]) {
                b[nu + q] += it.value() * g[j];
            } else {
                if (q != pinned) entries.emplace_back(nu + q, j, -it.value());
                entries.emplace_back(j, nu + q, -it.value());
            }
        }
    }
    for (int i = 0; i < nu; ++i) {
        if (fixed[i]) {
            entries.emplace_back(i, i, 1.0);
            b[i] = g[i];
        }
    }
    if (pinned >= 0) {
        // column of the pinned DOF stays; p_pinned = 0 fixes the constant, removed again below
        entries.erase(std::remove_if(entries.begin(), entries.end(),
                                     [&](const auto& t) { return t.col() == nu + pinned; }),
                      entries.end());
        entries.emplace_back(nu + pinned, nu + pinned, 1.0);
        b[nu + pinned] = 0.0;
    }
    SparseMatrix S(n, n);
    S.setFromTriplets(entries.begin(), entries.end());

    Attempt best{Eigen::VectorXd(), std::numeric_limits<double>::infinity()};
    if (cache != nullptr && cache->solver_ && cache->size_ == n) {
        best = refine_with(*cache->solver_, S, b, kReuseIterations);
        if (best.residual <= kResidualTarget) {
            ++cache->reused_;
        } else {
            best.residual = std::numeric_limits<double>::infinity();
        }
    }
    if (!(best.residual <= kResidualTarget)) {
        auto solver = make_direct_solver();
        try {
            best = solve_refined(*solver, S, b);
        } catch (const SolverError&) {
            if (solver->name() != "umfpack") throw;
            best = {Eigen::VectorXd(), std::numeric_limits<double>::infinity()};
        }
        if (!acceptable(best.residual) && solver->name() == "umfpack") {
            // seen with OpenBLAS kernels that return wrong dgemm/dtrsm results on some AVX-512 hosts
            if (!umfpack_disabled.exchange(true)) {
                std::fprintf(stderr,
                             "emapr: UMFPACK residual %.3e above %.0e; switching to Eigen SparseLU for this process "
                             "(for OpenBLAS try OPENBLAS_CORETYPE=Haswell)\n",
                             best.residual, kResidualLimit);
            }
            solver = std::make_unique<SparseLUSolver>();
            best = solve_refined(*solver, S, b);
        }
        if (cache != nullptr) {
            cache->solver_ = std::move(solver);
            cache->size_ = n;
            ++cache->factorizations_;
        }
    }
    if (!acceptable(best.residual)) {
        std::ostringstream msg;
        msg << "solve_linear: relative residual " << best.residual << " exceeds " << kResidualLimit << " (" << nu
            << " velocity, " << np << " pressure unknowns)";
        throw SolverError(msg.str());
    }

    SaddleSolution out;
    out.u = best.x.head(nu);
    out.p = best.x.segment(nu, np);
    const double area = s.mean_weights.dot(s.pressure_constant);
    if (np > 0 && area > 0.0) {
        out.p -= (s.mean_weights.dot(out.p) / area) * s.pressure_constant;
        out.multiplier = s.pressure_constant.dot(s.B * out.u - s.rhs_p) / area;
    }
    out.residual = best.residual;
    return out;
}

std::string_view method_name(NonlinearMethod method) {
    switch (method) {
        case NonlinearMethod::Picard: return "picard";
        case NonlinearMethod::Newton: return "newton";
        case NonlinearMethod::Extrapolated: return "extrapolated";
    }
    return "unknown";
}

NonlinearMethod parse_method(std::string_view name) {
    for (auto m : {NonlinearMethod::Picard, NonlinearMethod::Newton, NonlinearMethod::Extrapolated}) {
        if (method_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown nonlinear method '" + std::string(name) + "'");
}

NonlinearResult nonlinear_solve(const StepProblem& problem, const NonlinearSettings& settings,
                                const Eigen::VectorXd& initial_guess) {
    if (!(settings.tolerance > 0.0)) throw std::invalid_argument("nonlinear_solve: tolerance must be positive");
    if (settings.max_iterations < 1) throw std::invalid_argument("nonlinear_solve: max_iterations must be >= 1");

    SaddleSystem sys;
    sys.B = problem.B;
    sys.mean_weights = problem.mean_weights;
    sys.pressure_constant = problem.pressure_constant;
    sys.rhs_p = problem.rhs_p;
    sys.constrained = problem.constrained;
    sys.constrained_values = problem.constrained_values;

    auto increment_norm = [&](const Eigen::VectorXd& d) {
        return problem.increment_scale * std::sqrt(std::max(0.0, d.dot(problem.norm_matrix * d)));
    };

    NonlinearResult result;
    if (problem.convection == nullptr || settings.method == NonlinearMethod::Extrapolated) {
        sys.K = problem.K_linear;
        if (problem.convection != nullptr) sys.K += problem.convection->assemble(problem.form, problem.beta);
        sys.rhs_u = problem.rhs_u;
        result.solution = solve_linear(sys, problem.cache);
        result.iterations = 1;
        result.last_increment = increment_norm(result.solution.u - initial_guess);
        result.increments.push_back(result.last_increment);
        return result;
    }

    Eigen::VectorXd w = initial_guess;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        const SparseMatrix N = problem.convection->assemble(problem.form, w);
        sys.K = problem.K_linear + N;
        sys.rhs_u = problem.rhs_u;
        if (settings.method == NonlinearMethod::Newton) {
            const SparseMatrix Nhat = problem.convection->assemble_advection_derivative(problem.form, w);
            sys.K += Nhat;
            sys.rhs_u += N * w;
        }
        result.solution = solve_linear(sys, problem.cache);
        const double inc = increment_norm(result.solution.u - w);
        w = result.solution.u;
        result.iterations = it;
        result.last_increment = inc;
        result.increments.push_back(inc);
        if (inc < settings.tolerance) return result;
    }
    throw NonConvergenceError("nonlinear_solve: no convergence after " + std::to_string(settings.max_iterations) +
                                  " iterations (last increment " + std::to_string(result.last_increment) + ")",
                              result.iterations, result.last_increment);
}

}  // namespace emapr
