#pragma once

#include "emapr/diagnostics.hpp"

namespace emapr {

/// u = min(t,1) grad chi, chi = x^3 y - y^3 x on (0,1)^2, f = amplitude * grad chi.
ExactSolution potential_flow(double nu, double gradient_amplitude = 0.0);

/// Steady Gresho vortex on (-0.5,0.5)^2 with nu = 0 and f = 0. The pressure
/// follows the published constants and is not normalized to zero mean.
ExactSolution gresho();
double gresho_pressure(const Vec2& x);

/// u = u0 exp(-8 pi^2 nu t), u0 = (sin 2pi x sin 2pi y, cos 2pi x cos 2pi y), on (0,1)^2.
ExactSolution lattice_vortex(double nu);

/// u = (1 + t) curl(g(x) g(y)), g(s) = s^2 (1-s)^2, p = (1 + t)^2 (x^3 + y^3 - 1/2) on (0,1)^2.
/// Vanishes on the boundary; f is computed from the momentum equation.
ExactSolution manufactured(double nu);

}  // namespace emapr
