#include "chmhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace chmhd {

namespace detail {
void check_failed(const char* expr, const char* file, int line, const std::string& msg) {
    throw Error(std::string("internal check failed: ") + expr + " at " + file + ":" +
                std::to_string(line) + (msg.empty() ? "" : (": " + msg)));
}
}  // namespace detail

const char* side_name(Side s) {
    switch (s) {
        case Side::Bottom: return "Bottom";
        case Side::Right: return "Right";
        case Side::Top: return "Top";
        case Side::Left: return "Left";
    }
    return "?";
}

Side resolve_side(unsigned char mask) {
    CHMHD_REQUIRE(mask != 0, "resolve_side on interior node");
    for (Side s : {Side::Bottom, Side::Top, Side::Left, Side::Right})
        if ((mask >> static_cast<int>(s)) & 1) return s;
    return Side::Bottom;  // unreachable
}

Mesh build_mesh(const Rect& rect, int nx, int ny) {
    CHMHD_REQUIRE(nx >= 1 && ny >= 1, "mesh needs nx >= 1 and ny >= 1");
    CHMHD_REQUIRE(rect.x0 < rect.x1 && rect.y0 < rect.y1, "degenerate rectangle");

    Mesh m;
    m.rect = rect;
    m.nx = nx;
    m.ny = ny;
    m.cell_dx = rect.width() / nx;
    m.cell_dy = rect.height() / ny;

    m.nodes.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            // Endpoints exact, interior points by linear blend.
            double x = (i == nx) ? rect.x1 : rect.x0 + i * m.cell_dx;
            double y = (j == ny) ? rect.y1 : rect.y0 + j * m.cell_dy;
            m.nodes.push_back({x, y});
        }

    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    m.tris.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j);
            int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            // Diagonal from lower-left to upper-right; both triangles CCW.
            m.tris.push_back({{v00, v10, v11}});
            m.tris.push_back({{v00, v11, v01}});
        }

    m.h_max = std::sqrt(m.cell_dx * m.cell_dx + m.cell_dy * m.cell_dy);

    // Boundary edges, counterclockwise: bottom row, right column, top row
    // (reversed), left column (reversed).
    for (int i = 0; i < nx; ++i) m.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), Side::Bottom});
    for (int j = 0; j < ny; ++j) m.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), Side::Right});
    for (int i = nx; i > 0; --i) m.boundary_edges.push_back({vid(i, ny), vid(i - 1, ny), Side::Top});
    for (int j = ny; j > 0; --j) m.boundary_edges.push_back({vid(0, j), vid(0, j - 1), Side::Left});

    classify_boundary(m);

    m.boundary_nodes.clear();
    for (int n = 0; n < m.n_nodes(); ++n)
        if (m.node_sides[n]) m.boundary_nodes.push_back(n);
    return m;
}

void classify_boundary(Mesh& mesh) {
    const double tol = 1e-12 * std::max(mesh.h_max, 1.0);
    auto side_of = [&](Vec2 a, Vec2 b) -> Side {
        if (std::abs(a.y - mesh.rect.y0) < tol && std::abs(b.y - mesh.rect.y0) < tol) return Side::Bottom;
        if (std::abs(a.x - mesh.rect.x1) < tol && std::abs(b.x - mesh.rect.x1) < tol) return Side::Right;
        if (std::abs(a.y - mesh.rect.y1) < tol && std::abs(b.y - mesh.rect.y1) < tol) return Side::Top;
        if (std::abs(a.x - mesh.rect.x0) < tol && std::abs(b.x - mesh.rect.x0) < tol) return Side::Left;
        throw Error("boundary edge lies on no rectangle side (corrupt mesh)");
    };

    mesh.node_sides.assign(mesh.nodes.size(), 0);
    for (auto& e : mesh.boundary_edges) {
        e.side = side_of(mesh.nodes[e.a], mesh.nodes[e.b]);
        mesh.node_sides[e.a] |= static_cast<unsigned char>(1u << static_cast<int>(e.side));
        mesh.node_sides[e.b] |= static_cast<unsigned char>(1u << static_cast<int>(e.side));
    }
}

TriGeom tri_geometry(const Mesh& mesh, int tri) {
    const auto& t = mesh.tris[tri];
    Vec2 p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
    double twoA = cross(p1 - p0, p2 - p0);
    CHMHD_CHECK(twoA > 0.0, "triangle not counterclockwise / degenerate");
    TriGeom g;
    g.area = 0.5 * twoA;
    // grad(lambda_i) is the inward normal of the opposite edge over 2A.
    g.grad[0] = (1.0 / twoA) * Vec2{p1.y - p2.y, p2.x - p1.x};
    g.grad[1] = (1.0 / twoA) * Vec2{p2.y - p0.y, p0.x - p2.x};
    g.grad[2] = (1.0 / twoA) * Vec2{p0.y - p1.y, p1.x - p0.x};
    return g;
}

Vec2 bary_to_xy(const Mesh& mesh, int tri, double l0, double l1, double l2) {
    const auto& t = mesh.tris[tri];
    return l0 * mesh.nodes[t[0]] + l1 * mesh.nodes[t[1]] + l2 * mesh.nodes[t[2]];
}

int locate_triangle(const Mesh& mesh, Vec2 p) {
    const double tol = 1e-12 * std::max({mesh.rect.width(), mesh.rect.height(), 1.0});
    CHMHD_REQUIRE(p.x >= mesh.rect.x0 - tol && p.x <= mesh.rect.x1 + tol &&
                      p.y >= mesh.rect.y0 - tol && p.y <= mesh.rect.y1 + tol,
                  "point outside mesh");
    double fx = (p.x - mesh.rect.x0) / mesh.cell_dx;
    double fy = (p.y - mesh.rect.y0) / mesh.cell_dy;
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, mesh.nx - 1);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, mesh.ny - 1);
    // Cell-local fractions; the lower-right half (rx >= ry) is the first of
    // the two triangles in construction order.
    double rx = fx - i, ry = fy - j;
    int cell = 2 * (j * mesh.nx + i);
    return (rx >= ry) ? cell : cell + 1;
}

}  // namespace chmhd
