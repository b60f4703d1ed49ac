#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace emapr {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Barycentric coordinates (lambda_0, lambda_1, lambda_2) of a point in a triangle.
using Bary = std::array<double, 3>;

struct Rectangle {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;
};

/**
 * Affine geometry of one triangle, cached at mesh construction.
 *
 * Local edge i is the edge opposite local vertex i, i.e. it joins local
 * vertices i+1 and i+2 (mod 3). All quantities are constant per cell.
 */
struct CellGeometry {
    std::array<Vec2, 3> vertices;
    Mat2 jacobian;                       ///< columns a1-a0, a2-a0
    double det = 0.0;                    ///< twice the signed area
    std::array<Vec2, 3> grad_lambda;     ///< gradients of the barycentric coordinates
    double diameter = 0.0;               ///< h_K, longest edge
    double inscribed_diameter = 0.0;     ///< diameter of the inscribed circle
    std::array<double, 3> edge_length{};
    std::array<Vec2, 3> outward_normal;  ///< unit outward normal of local edge i

    /// +1 when the global normal of local edge i points out of this cell.
    std::array<int, 3> edge_sign{};
    /// true when the global edge runs from local vertex i+2 to i+1 (instead of i+1 to i+2).
    std::array<bool, 3> edge_reversed{};

    double area() const { return 0.5 * det; }
    Vec2 centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
    Vec2 map(const Bary& l) const { return l[0] * vertices[0] + l[1] * vertices[1] + l[2] * vertices[2]; }
    Bary barycentric(const Vec2& x) const;
    /// Unit normal of local edge i in the global orientation.
    Vec2 global_normal(int i) const { return static_cast<double>(edge_sign[i]) * outward_normal[i]; }
};

/**
 * Conforming triangulation with oriented edge topology.
 *
 * Cells are counterclockwise. Global edges store their vertex pair sorted by
 * index; the global edge normal points out of the lower-indexed adjacent cell
 * (outward on the boundary). Immutable after construction.
 */
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Vec2& vertex(int v) const { return vertices_[v]; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::array<int, 3>& cell(int c) const { return cells_[c]; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }
    const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }
    int cell_edge_sign(int c, int i) const { return geometry_[c].edge_sign[i]; }
    /// Adjacent cells, lower index first; second entry is -1 on the boundary.
    const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
    bool is_boundary_edge(int e) const { return edge_cells_[e][1] < 0; }
    bool is_boundary_vertex(int v) const { return boundary_vertex_[v]; }
    const CellGeometry& geometry(int c) const { return geometry_[c]; }
    Vec2 edge_normal(int e) const;
    double edge_length(int e) const { return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm(); }
    Vec2 edge_midpoint(int e) const { return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]); }
    double max_h() const;
    double total_area() const;

private:
    void build_topology();

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<std::array<int, 2>> edge_cells_;
    std::vector<bool> boundary_vertex_;
    std::vector<CellGeometry> geometry_;
};

/// n x n squares, each split into two right triangles along the (x0,y0)-(x1,y1) diagonal direction.
Mesh build_uniform_square_mesh(int n, const Rectangle& domain = {});

/// Red refinement: every triangle is split into four similar children.
Mesh refine_uniform(const Mesh& mesh);

/// Moves interior vertices by up to `magnitude` times the local mesh size.
/// Deterministic for a fixed seed; boundary vertices stay fixed.
Mesh perturb_interior_vertices(const Mesh& mesh, double magnitude, std::uint64_t seed);

/// max over cells of h_K / (inscribed diameter).
double shape_regularity(const Mesh& mesh);

/// Plain-text format: "nverts ncells", one "x y" line per vertex, one
/// "i j k" line per cell with 1-based vertex indices.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace emapr
