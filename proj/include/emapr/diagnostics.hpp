#pragma once

#include "emapr/reconstruct.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace emapr {

struct ExactSolution {
    std::function<Vec2(double, const Vec2&)> u;
    std::function<Mat2(double, const Vec2&)> grad_u;  ///< grad(r, c) = d u_r / d x_c
    std::function<double(double, const Vec2&)> p;     ///< zero mean over the domain; may be empty
    std::function<Vec2(double, const Vec2&)> f;       ///< may be empty (zero forcing)
    bool steady_forcing = false;
    double nu = 0.0;
    double T = 0.0;
    Rectangle domain;
};

struct ConservedQuantities {
    double E = 0.0;    ///< 1/2 ||w||^2
    double E_d = 0.0;  ///< 1/2 d_h(u, u), or E when not reconstructed
    Vec2 M = Vec2::Zero();
    double M_x = 0.0;  ///< int (w_1 y - w_2 x), the third component of int w x x
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ErrorBundle {
    double L2_u = kNaN;
    double L2_Pu = kNaN;
    double H1_u = kNaN;
    double L2_p = kNaN;
    double L2_Php = kNaN;
};

struct DiagnosticsRecord {
    double t = 0.0;
    ConservedQuantities q;
    ErrorBundle errors;
    double seminorm_star = 0.0;
};

/// With reconstructed = true the quantities are those of w = Pi_h u_h; otherwise of u_h itself.
ConservedQuantities conserved_quantities(const ReconstructionOperators& ops, const Eigen::VectorXd& u, double alpha,
                                         bool reconstructed = true);

/// E, M, M_x of a given field by composite mesh quadrature, each cell split into
/// subdivisions^2 congruent triangles (E_d is set to E).
ConservedQuantities field_quantities(const Mesh& mesh, const VectorField& w, int subdivisions = 1,
                                     int degree = kAssemblyDegree);

/// Velocity errors at time t, pressure errors against p(p_time, .).
ErrorBundle error_norms(const ReconstructionOperators& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                        const ExactSolution& exact, double t, double p_time, int degree = kVerificationDegree);

/// rate_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i) for i = 1..n-1; absent when an error is not positive.
std::vector<std::optional<double>> eoc(const std::vector<std::pair<double, double>>& h_err);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);

}  // namespace emapr
