#pragma once

#include "emapr/mesh.hpp"

#include <vector>

namespace emapr {

/// Symmetric rule on the reference triangle in barycentric form.
/// Weights sum to one; scale by |K| at the use site.
struct QuadratureRule {
    std::vector<Bary> points;
    std::vector<double> weights;
    int degree = 0;  ///< polynomial exactness

    int size() const { return static_cast<int>(points.size()); }
};

/// Smallest tabulated rule exact for polynomials of total degree `degree` (1..10).
/// The returned rule may be exact to a higher degree than requested.
const QuadratureRule& quadrature_rule(int degree);

/// Gauss-Legendre rule on [0,1]; weights sum to one.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/// Rule with `n` points, exact to degree 2n-1.
const LineRule& gauss_legendre(int n);

inline constexpr int kAssemblyDegree = 8;
inline constexpr int kVerificationDegree = 10;

}  // namespace emapr
