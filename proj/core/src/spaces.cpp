#include "chmhd/spaces.hpp"

namespace chmhd {

int global_dof(const Space& s, const Mesh& mesh, int tri, int local) {
    const auto& t = mesh.tris[tri];
    switch (s.kind) {
        case SpaceKind::P1Scalar:
            return t[local];
        case SpaceKind::P1Vector2:
            return 2 * t[local / 2] + (local % 2);
        case SpaceKind::MiniVector2:
            if (local < 6) return 2 * t[local / 2] + (local % 2);
            return 2 * s.n_nodes + 2 * tri + (local - 6);
    }
    return -1;
}

void eval_shapes(const Space& s, const TriGeom& geom, double l0, double l1, double l2,
                 ShapeRef* out) {
    const double l[3] = {l0, l1, l2};
    switch (s.kind) {
        case SpaceKind::P1Scalar:
            for (int i = 0; i < 3; ++i) out[i] = {l[i], geom.grad[i], 0};
            return;
        case SpaceKind::P1Vector2:
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 2; ++c) out[2 * i + c] = {l[i], geom.grad[i], c};
            return;
        case SpaceKind::MiniVector2: {
            for (int i = 0; i < 3; ++i)
                for (int c = 0; c < 2; ++c) out[2 * i + c] = {l[i], geom.grad[i], c};
            double bv = bubble_value(l0, l1, l2);
            Vec2 bg = bubble_gradient(geom, l0, l1, l2);
            out[6] = {bv, bg, 0};
            out[7] = {bv, bg, 1};
            return;
        }
    }
}

void eval_field_local(const FieldVec& f, const Mesh& mesh, const TriGeom& geom, int tri,
                      double l0, double l1, double l2, double out_value[2],
                      Vec2 out_gradient[2]) {
    const int nl = f.space.local_count();
    ShapeRef sh[8];
    eval_shapes(f.space, geom, l0, l1, l2, sh);
    out_value[0] = out_value[1] = 0.0;
    if (out_gradient) out_gradient[0] = out_gradient[1] = Vec2{};
    for (int a = 0; a < nl; ++a) {
        double c = f.coeffs[global_dof(f.space, mesh, tri, a)];
        out_value[sh[a].comp] += c * sh[a].v;
        if (out_gradient) {
            out_gradient[sh[a].comp].x += c * sh[a].g.x;
            out_gradient[sh[a].comp].y += c * sh[a].g.y;
        }
    }
}

void eval_field_at(const FieldVec& f, const Mesh& mesh, Vec2 p, double out_value[2],
                   Vec2 out_gradient[2]) {
    int tri = locate_triangle(mesh, p);
    TriGeom g = tri_geometry(mesh, tri);
    const auto& t = mesh.tris[tri];
    // Barycentric coordinates from the constant gradients: l_i is affine with
    // gradient g.grad[i] and value 1 at vertex i.
    Vec2 p0 = mesh.nodes[t[0]];
    double l1 = dot(g.grad[1], p - p0);
    double l2 = dot(g.grad[2], p - p0);
    double l0 = 1.0 - l1 - l2;
    eval_field_local(f, mesh, g, tri, l0, l1, l2, out_value, out_gradient);
}

}  // namespace chmhd
