#include "emapr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace emapr {

namespace {

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

double signed_double_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

CellGeometry make_geometry(const Vec2& a0, const Vec2& a1, const Vec2& a2) {
    CellGeometry g;
    g.vertices = {a0, a1, a2};
    g.jacobian.col(0) = a1 - a0;
    g.jacobian.col(1) = a2 - a0;
    g.det = g.jacobian.determinant();

    // grad lambda_i = rot(a_{i+2} - a_{i+1}) / det, rotated clockwise by 90 degrees.
    for (int i = 0; i < 3; ++i) {
        const Vec2& p = g.vertices[(i + 1) % 3];
        const Vec2& q = g.vertices[(i + 2) % 3];
        const Vec2 t = q - p;
        g.grad_lambda[i] = Vec2(p.y() - q.y(), q.x() - p.x()) / g.det;
        g.edge_length[i] = t.norm();
        // outward normal of edge i is -grad(lambda_i)/|grad(lambda_i)|
        g.outward_normal[i] = -g.grad_lambda[i].normalized();
    }
    g.diameter = *std::max_element(g.edge_length.begin(), g.edge_length.end());
    const double perimeter = g.edge_length[0] + g.edge_length[1] + g.edge_length[2];
    g.inscribed_diameter = 2.0 * g.det / perimeter;  // 2 * (2 * area / perimeter)
    return g;
}

double uniform_pm1(std::mt19937_64& rng) {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

Bary CellGeometry::barycentric(const Vec2& x) const {
    const Vec2 ref = jacobian.partialPivLu().solve(x - vertices[0]);
    return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
    const int nv = num_vertices();
    for (const auto& c : cells_) {
        for (int v : c) {
            if (v < 0 || v >= nv) throw std::invalid_argument("mesh: cell references a missing vertex");
        }
        if (!(signed_double_area(vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]) > 0.0)) {
            throw std::invalid_argument("mesh: cell with non-positive signed area");
        }
    }
    build_topology();
}

void Mesh::build_topology() {
    const int nc = num_cells();
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(static_cast<std::size_t>(3 * nc));
    cell_edges_.assign(nc, {-1, -1, -1});
    edges_.clear();
    edge_cells_.clear();

    for (int c = 0; c < nc; ++c) {
        const auto& cv = cells_[c];
        for (int i = 0; i < 3; ++i) {
            const int a = cv[(i + 1) % 3];
            const int b = cv[(i + 2) % 3];
            auto [it, inserted] = index.try_emplace(edge_key(a, b), num_edges());
            if (inserted) {
                edges_.push_back({std::min(a, b), std::max(a, b)});
                edge_cells_.push_back({c, -1});
            } else {
                auto& adj = edge_cells_[it->second];
                if (adj[1] >= 0) throw std::invalid_argument("mesh: edge shared by more than two cells");
                adj[1] = c;  // cells are visited in increasing order, so adj[0] < c
            }
            cell_edges_[c][i] = it->second;
        }
    }

    boundary_vertex_.assign(num_vertices(), false);
    for (int e = 0; e < num_edges(); ++e) {
        if (edge_cells_[e][1] < 0) {
            boundary_vertex_[edges_[e][0]] = true;
            boundary_vertex_[edges_[e][1]] = true;
        }
    }

    geometry_.resize(nc);
    for (int c = 0; c < nc; ++c) {
        const auto& cv = cells_[c];
        CellGeometry g = make_geometry(vertices_[cv[0]], vertices_[cv[1]], vertices_[cv[2]]);
        for (int i = 0; i < 3; ++i) {
            const int e = cell_edges_[c][i];
            g.edge_sign[i] = (edge_cells_[e][0] == c) ? 1 : -1;
            g.edge_reversed[i] = edges_[e][0] != cv[(i + 1) % 3];
        }
        geometry_[c] = g;
    }
}

Vec2 Mesh::edge_normal(int e) const {
    const int c = edge_cells_[e][0];
    const auto& ce = cell_edges_[c];
    for (int i = 0; i < 3; ++i) {
        if (ce[i] == e) return geometry_[c].outward_normal[i];
    }
    throw std::logic_error("mesh: inconsistent edge topology");
}

double Mesh::max_h() const {
    double h = 0.0;
    for (const auto& g : geometry_) h = std::max(h, g.diameter);
    return h;
}

double Mesh::total_area() const {
    double a = 0.0;
    for (const auto& g : geometry_) a += g.area();
    return a;
}

Mesh build_uniform_square_mesh(int n, const Rectangle& domain) {
    if (n < 1) throw std::invalid_argument("build_uniform_square_mesh: n must be >= 1");
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
        throw std::invalid_argument("build_uniform_square_mesh: degenerate domain");
    }
    const int np = n + 1;
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>(np) * np);
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
            const double x = domain.x0 + (domain.x1 - domain.x0) * i / n;
            const double y = domain.y0 + (domain.y1 - domain.y0) * j / n;
            verts.emplace_back(x, y);
        }
    }
    auto vid = [np](int i, int j) { return j * np + i; };
    std::vector<std::array<int, 3>> cells;
    cells.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    return Mesh(std::move(verts), std::move(cells));
}

Mesh refine_uniform(const Mesh& mesh) {
    const int nv = mesh.num_vertices();
    std::vector<Vec2> verts = mesh.vertices();
    verts.reserve(static_cast<std::size_t>(nv + mesh.num_edges()));
    for (int e = 0; e < mesh.num_edges(); ++e) verts.push_back(mesh.edge_midpoint(e));

    std::vector<std::array<int, 3>> cells;
    cells.reserve(4 * static_cast<std::size_t>(mesh.num_cells()));
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& a = mesh.cell(c);
        const auto& ce = mesh.cell_edges(c);
        const int m0 = nv + ce[0], m1 = nv + ce[1], m2 = nv + ce[2];
        cells.push_back({a[0], m2, m1});
        cells.push_back({m2, a[1], m0});
        cells.push_back({m1, m0, a[2]});
        cells.push_back({m0, m1, m2});
    }
    return Mesh(std::move(verts), std::move(cells));
}

Mesh perturb_interior_vertices(const Mesh& mesh, double magnitude, std::uint64_t seed) {
    if (!(magnitude >= 0.0) || !(magnitude < 0.3)) {
        throw std::invalid_argument("perturb_interior_vertices: magnitude must lie in [0, 0.3)");
    }
    std::vector<Vec2> verts = mesh.vertices();
    if (magnitude == 0.0) return Mesh(std::move(verts), mesh.cells());

    const int nv = mesh.num_vertices();
    std::vector<std::vector<int>> vertex_cells(nv);
    std::vector<double> local_h(nv, std::numeric_limits<double>::infinity());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (int v : mesh.cell(c)) vertex_cells[v].push_back(c);
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const double len = mesh.edge_length(e);
        for (int v : mesh.edge(e)) local_h[v] = std::min(local_h[v], len);
    }

    std::mt19937_64 rng(seed);
    const auto& cells = mesh.cells();
    auto star_valid = [&](int v) {
        for (int c : vertex_cells[v]) {
            const auto& cv = cells[c];
            // reject strongly flattened cells as well as inverted ones
            const double a = signed_double_area(verts[cv[0]], verts[cv[1]], verts[cv[2]]);
            const double ref = mesh.geometry(c).det;
            if (!(a > 0.25 * ref)) return false;
        }
        return true;
    };

    for (int v = 0; v < nv; ++v) {
        // draw unconditionally so the stream does not depend on boundary layout
        const Vec2 dir(uniform_pm1(rng), uniform_pm1(rng));
        if (mesh.is_boundary_vertex(v)) continue;
        const Vec2 origin = verts[v];
        double scale = magnitude * local_h[v];
        for (int attempt = 0; attempt < 40; ++attempt) {
            verts[v] = origin + scale * dir;
            if (star_valid(v)) break;
            scale *= 0.5;
            verts[v] = origin;
        }
    }
    return Mesh(std::move(verts), mesh.cells());
}

double shape_regularity(const Mesh& mesh) {
    double ratio = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& g = mesh.geometry(c);
        ratio = std::max(ratio, g.diameter / g.inscribed_diameter);
    }
    return ratio;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out.precision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
    for (const auto& c : mesh.cells()) out << c[0] + 1 << ' ' << c[1] + 1 << ' ' << c[2] + 1 << '\n';
}

Mesh read_mesh(std::istream& in) {
    long nv = -1, nc = -1;
    if (!(in >> nv >> nc) || nv < 3 || nc < 1) throw std::invalid_argument("read_mesh: bad header");
    std::vector<Vec2> verts(static_cast<std::size_t>(nv));
    for (auto& v : verts) {
        if (!(in >> v.x() >> v.y())) throw std::invalid_argument("read_mesh: truncated vertex block");
    }
    std::vector<std::array<int, 3>> cells(static_cast<std::size_t>(nc));
    for (auto& c : cells) {
        for (int& idx : c) {
            if (!(in >> idx)) throw std::invalid_argument("read_mesh: truncated cell block");
            idx -= 1;
        }
    }
    return Mesh(std::move(verts), std::move(cells));
}

}  // namespace emapr
