// Structured triangulations of axis-aligned rectangles. Each grid cell is
// split by the diagonal from its lower-left to its upper-right corner, which
// keeps meshes (and therefore error tables) bit-reproducible.
#pragma once

#include <array>
#include <vector>

#include "chmhd/util.hpp"

namespace chmhd {

struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

enum class Side : int { Bottom = 0, Right = 1, Top = 2, Left = 3 };

const char* side_name(Side s);

struct BoundaryEdge {
    int a = -1, b = -1;  // node indices, oriented counterclockwise along the boundary
    Side side = Side::Bottom;
};

struct Mesh {
    Rect rect;
    int nx = 0, ny = 0;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> tris;  // counterclockwise vertex indices
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<int> boundary_nodes;        // sorted, unique
    std::vector<unsigned char> node_sides;  // bitmask, bit = static_cast<int>(Side); 0 = interior
    double h_max = 0.0;                     // max edge length
    double cell_dx = 0.0, cell_dy = 0.0;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_tris() const { return static_cast<int>(tris.size()); }
    bool on_boundary(int node) const { return node_sides[node] != 0; }
    bool node_on(int node, Side s) const { return (node_sides[node] >> static_cast<int>(s)) & 1; }
};

// Corner nodes lie on two sides; where a single owner is needed, the fixed
// precedence Bottom, Top, Left, Right decides.
Side resolve_side(unsigned char sides_mask);

// Uniform (nx x ny)-cell grid over rect, two triangles per cell.
// Throws on nx/ny = 0 or a degenerate rectangle.
Mesh build_mesh(const Rect& rect, int nx, int ny);

// Tag every boundary edge with the rectangle side it lies on (coordinate
// tolerance 1e-12 * h). build_mesh already calls this; exposed separately so
// a mesh with cleared tags can be reclassified. Throws if an edge lies on no
// side (corrupt mesh).
void classify_boundary(Mesh& mesh);

// Constant P1 geometry of one triangle: signed area and the (constant)
// gradients of the three barycentric coordinate functions.
struct TriGeom {
    double area = 0.0;
    Vec2 grad[3];
};

TriGeom tri_geometry(const Mesh& mesh, int tri);

// Map barycentric coordinates on a triangle to physical coordinates.
Vec2 bary_to_xy(const Mesh& mesh, int tri, double l0, double l1, double l2);

// Locate the triangle containing a point (structured lookup, O(1)).
// Throws for points outside the rectangle (beyond 1e-12 tolerance).
int locate_triangle(const Mesh& mesh, Vec2 p);

}  // namespace chmhd
