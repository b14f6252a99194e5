// Finite element spaces on triangles: P1 scalars, P1 2-vectors, and the MINI
// velocity space (P1 plus one cubic bubble per triangle and component). All
// vector DOFs are scalar shapes times a unit coordinate vector, so element
// loops only ever deal in scalar shape values/gradients plus a component tag.
#pragma once

#include <vector>

#include "chmhd/mesh.hpp"
#include "chmhd/util.hpp"

namespace chmhd {

enum class SpaceKind { P1Scalar, P1Vector2, MiniVector2 };

struct Space {
    SpaceKind kind = SpaceKind::P1Scalar;
    int n_nodes = 0;
    int n_tris = 0;

    int dof_count() const {
        switch (kind) {
            case SpaceKind::P1Scalar: return n_nodes;
            case SpaceKind::P1Vector2: return 2 * n_nodes;
            case SpaceKind::MiniVector2: return 2 * (n_nodes + n_tris);
        }
        return 0;
    }
    // local DOFs per triangle: 3 scalar, 6 vector, 8 MINI
    int local_count() const {
        switch (kind) {
            case SpaceKind::P1Scalar: return 3;
            case SpaceKind::P1Vector2: return 6;
            case SpaceKind::MiniVector2: return 8;
        }
        return 0;
    }
};

inline Space make_space(SpaceKind kind, const Mesh& mesh) {
    return {kind, mesh.n_nodes(), mesh.n_tris()};
}

struct FieldVec {
    Space space;
    std::vector<double> coeffs;
};

inline FieldVec make_field(const Space& s) { return {s, std::vector<double>(s.dof_count(), 0.0)}; }

// One local basis function at one quadrature point: scalar shape value,
// physical gradient, and the coordinate component it acts on (0 for scalars).
struct ShapeRef {
    double v = 0.0;
    Vec2 g{};
    int comp = 0;
};

// Local -> global DOF index.
// P1Scalar locals 0..2 are the vertices; vector spaces interleave components
// (node n gives 2n, 2n+1); MINI appends bubble pairs after all nodal DOFs.
int global_dof(const Space& s, const Mesh& mesh, int tri, int local);

// Shape values and physical gradients of all local basis functions of a
// space at one barycentric point of a triangle. `out` must hold local_count()
// entries. Gradients use the element's constant barycentric gradients.
void eval_shapes(const Space& s, const TriGeom& geom, double l0, double l1, double l2,
                 ShapeRef* out);

// Bubble shape: 27*l0*l1*l2, value 1 at the centroid, zero on element edges.
inline double bubble_value(double l0, double l1, double l2) { return 27.0 * l0 * l1 * l2; }
inline Vec2 bubble_gradient(const TriGeom& g, double l0, double l1, double l2) {
    return 27.0 * (l1 * l2 * g.grad[0] + l0 * l2 * g.grad[1] + l0 * l1 * g.grad[2]);
}

// Value (and optional gradient) of a field at a barycentric point of a
// triangle. Scalar fields use out_value[0]; vector fields fill both slots.
void eval_field_local(const FieldVec& f, const Mesh& mesh, const TriGeom& geom, int tri,
                      double l0, double l1, double l2, double out_value[2],
                      Vec2 out_gradient[2] = nullptr);

// Point evaluation anywhere in the mesh (locates the triangle first).
void eval_field_at(const FieldVec& f, const Mesh& mesh, Vec2 p, double out_value[2],
                   Vec2 out_gradient[2] = nullptr);

}  // namespace chmhd
