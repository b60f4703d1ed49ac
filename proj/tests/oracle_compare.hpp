#pragma once

#include "oracle.hpp"

#include "emapr/forms.hpp"

#include <array>
#include <string>
#include <vector>

namespace oracle {

/// Largest entrywise differences between library and oracle matrices.
struct Comparison {
    double A = 0.0;
    double B = 0.0;
    double M_d = 0.0;
    std::array<double, 6> N{};
    std::array<double, 6> Nhat{};
    double scale = 0.0;  ///< largest oracle entry over all matrices
    std::string matching_error;  ///< non-empty when DOFs could not be matched

    double worst() const;
};

/// Two cells of unequal shape sharing one interior edge.
void two_cell_mesh(std::vector<V2>& vertices, std::vector<std::array<int, 3>>& cells);

Comparison compare_two_cell(emapr::ElementKind kind, double alpha, unsigned seed = 7);

}  // namespace oracle
