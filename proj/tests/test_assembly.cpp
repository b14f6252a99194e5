// Generic operator assembly against hand-computed element matrices and
// closed-form integrals, plus the projector's approximation order.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chmhd/assembly.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/quadrature.hpp"
#include "chmhd/spaces.hpp"

using namespace chmhd;

namespace {

// The canonical right triangle (0,0), (1,0), (0,1) as a one-element mesh.
// Operator assembly only touches nodes and connectivity, so the boundary
// metadata can stay empty.
Mesh reference_triangle() {
    Mesh m;
    m.rect = {0, 1, 0, 1};
    m.nodes = {{0, 0}, {1, 0}, {0, 1}};
    m.tris = {{0, 1, 2}};
    return m;
}

double entry(const CompressedMatrix& A, int i, int j) {
    for (std::int64_t k = A.row_ptr[size_t(i)]; k < A.row_ptr[size_t(i) + 1]; ++k)
        if (A.col_idx[size_t(k)] == j) return A.values[size_t(k)];
    return 0.0;
}

}  // namespace

TEST_CASE("element mass matrix of the reference triangle") {
    const Mesh m = reference_triangle();
    const CompressedMatrix M = assemble_mass(make_space(SpaceKind::P1Scalar, m), m);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = i == j ? 1.0 / 12 : 1.0 / 24;
            CHECK(std::fabs(entry(M, i, j) - want) <= 1e-14);
        }
}

TEST_CASE("element stiffness matrix of the reference triangle") {
    const Mesh m = reference_triangle();
    const Kernel grad_dot = [](const KernelPoint&, const ShapeRef& trial, const ShapeRef& test) {
        return dot(trial.g, test.g);
    };
    const Space s = make_space(SpaceKind::P1Scalar, m);
    const CompressedMatrix K = assemble_weighted_operator(s, s, m, grad_dot);
    const double want[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(entry(K, i, j) - want[i][j]) <= 1e-14);
}

TEST_CASE("mass matrix row sums integrate the partition of unity") {
    const Mesh m = build_mesh({0, 1, 0, 1.5}, 3, 4);
    const CompressedMatrix M = assemble_mass(make_space(SpaceKind::P1Scalar, m), m);
    double total = 0;
    for (const double v : M.values) total += v;
    CHECK(total == doctest::Approx(m.rect.area()).epsilon(1e-13));
}

TEST_CASE("a value-product kernel reproduces the mass matrix bit for bit") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 3, 3);
    const Space s = make_space(SpaceKind::P1Vector2, m);
    const Kernel value_dot = [](const KernelPoint&, const ShapeRef& trial, const ShapeRef& test) {
        return trial.comp == test.comp ? trial.v * test.v : 0.0;
    };
    const CompressedMatrix A = assemble_weighted_operator(s, s, m, value_dot);
    const CompressedMatrix M = assemble_mass(s, m);
    REQUIRE(A.nnz() == M.nnz());
    CHECK(A.col_idx == M.col_idx);
    for (std::int64_t k = 0; k < A.nnz(); ++k)
        CHECK(std::fabs(A.values[size_t(k)] - M.values[size_t(k)]) <= 1e-15);
}

TEST_CASE("stiffness annihilates constants and measures gradients") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 4, 4);
    const Space s = make_space(SpaceKind::P1Scalar, m);
    const Kernel grad_dot = [](const KernelPoint&, const ShapeRef& trial, const ShapeRef& test) {
        return dot(trial.g, test.g);
    };
    const CompressedMatrix K = assemble_weighted_operator(s, s, m, grad_dot);
    const std::vector<double> ones(size_t(m.n_nodes()), 1.0);
    for (const double v : matvec(K, ones)) CHECK(std::fabs(v) < 1e-13);

    // u = x has |grad u|^2 integral 1 on the unit square
    std::vector<double> xs(size_t(m.n_nodes()));
    for (int n = 0; n < m.n_nodes(); ++n) xs[size_t(n)] = m.nodes[size_t(n)].x;
    const std::vector<double> Kx = matvec(K, xs);
    double quad = 0;
    for (int n = 0; n < m.n_nodes(); ++n) quad += xs[size_t(n)] * Kx[size_t(n)];
    CHECK(quad == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("load vector of the unit function sums to the area") {
    const Mesh m = build_mesh({0, 2, 0, 1}, 3, 2);
    const std::vector<double> load = assemble_load(make_space(SpaceKind::P1Scalar, m), m,
                                                   [](Vec2, double v[2]) { v[0] = 1.0; });
    double total = 0;
    for (const double v : load) total += v;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("integrate evaluates polynomial functionals exactly") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 5, 5);
    const double got = integrate(m, [](const KernelPoint& kp) {
        return kp.x.x * kp.x.x + kp.x.y;
    });
    CHECK(got == doctest::Approx(1.0 / 3 + 0.5).epsilon(1e-14));
}

TEST_CASE("projection error contracts at second order") {
    auto smooth = [](Vec2 p, double v[2]) { v[0] = std::sin(2.0 * p.x + 1.0) * std::cos(p.y); };
    auto err = [&](int nx) {
        const Mesh m = build_mesh({0, 1, 0, 1}, nx, nx);
        const FieldVec f = l2_project(make_space(SpaceKind::P1Scalar, m), m, smooth);
        return std::sqrt(integrate(m, [&](const KernelPoint& kp) {
            const TriGeom g = tri_geometry(m, kp.tri);
            const QuadPoint& qp = tri_quadrature().pts[kp.q];
            double v[2];
            eval_field_local(f, m, g, kp.tri, qp.l0, qp.l1, qp.l2, v);
            double want[2];
            smooth(kp.x, want);
            return (v[0] - want[0]) * (v[0] - want[0]);
        }));
    };
    const double ratio = err(8) / err(16);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}
