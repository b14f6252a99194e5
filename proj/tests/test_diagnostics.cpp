// State functionals: energy parts on states with one nonzero field each,
// mass, error norms with their interpolation rates, the centroid of the
// positive-phase region, the weak divergence residual, and the per-step
// dissipation budget.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chmhd/assembly.hpp"
#include "chmhd/diagnostics.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/physics.hpp"
#include "chmhd/scheme.hpp"

using namespace chmhd;

namespace {

PhysParams contrast_params() {
    PhysParams p;
    p.rho1 = 1.0;
    p.rho2 = 9.0;
    p.mu = 2.0;
    p.gamma = 0.05;
    p.epsilon = 0.02;
    return p;
}

void fill_nodal(FieldVec* f, const Mesh& m, const std::function<double(Vec2)>& fn) {
    for (int n = 0; n < m.n_nodes(); ++n) f->coeffs[size_t(n)] = fn(m.nodes[size_t(n)]);
}

}  // namespace

TEST_CASE("energy parts on single-field states") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 8, 8);
    const PhysParams prm = contrast_params();
    const double area = 1.0;

    // at rest with phi = 0 only the well term survives: F(0) = 1/4
    {
        const State s = make_state(m);
        const EnergyBreakdown e = discrete_energy(m, prm, s);
        CHECK(e.kinetic == 0.0);
        CHECK(e.magnetic == 0.0);
        CHECK(e.interface == 0.0);
        CHECK(e.well == doctest::Approx(prm.gamma / (4.0 * prm.epsilon) * area).epsilon(1e-13));
        CHECK(e.total == doctest::Approx(e.well).epsilon(1e-13));
    }

    // uniform velocity over phi = 0: kinetic = 1/2 rho_mean |u|^2 |Omega|
    {
        State s = make_state(m);
        for (int n = 0; n < m.n_nodes(); ++n) s.vel.coeffs[size_t(2 * n)] = 1.0;
        const EnergyBreakdown e = discrete_energy(m, prm, s);
        const double rho_mean = 0.5 * (prm.rho1 + prm.rho2);
        CHECK(e.kinetic == doctest::Approx(0.5 * rho_mean * area).epsilon(1e-12));
    }

    // uniform magnetic field: 1/(2 mu) |B|^2 |Omega|
    {
        State s = make_state(m);
        for (int n = 0; n < m.n_nodes(); ++n) s.mag.coeffs[size_t(2 * n + 1)] = 2.0;
        const EnergyBreakdown e = discrete_energy(m, prm, s);
        CHECK(e.magnetic == doctest::Approx(4.0 / (2.0 * prm.mu) * area).epsilon(1e-12));
    }

    // phi = x: interface = gamma eps/2 |Omega|, well = gamma/(4 eps) int (x^2-1)^2.
    // The integrand is piecewise quartic, so quadrature is exact: int_0^1 = 8/15.
    {
        State s = make_state(m);
        fill_nodal(&s.phi, m, [](Vec2 p) { return p.x; });
        const EnergyBreakdown e = discrete_energy(m, prm, s);
        CHECK(e.interface ==
              doctest::Approx(0.5 * prm.gamma * prm.epsilon * area).epsilon(1e-12));
        // nodal interpolation of x is exact, but the well integrand sees the
        // P1 field, which equals x, so the continuum value applies
        CHECK(e.well ==
              doctest::Approx(prm.gamma / (4.0 * prm.epsilon) * (8.0 / 15.0)).epsilon(1e-12));
        CHECK(e.total == doctest::Approx(e.interface + e.well).epsilon(1e-12));
    }
}

TEST_CASE("phase mass is linear and exact for nodal polynomials") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 6, 5);
    FieldVec f = make_field(make_space(SpaceKind::P1Scalar, m));

    for (double& c : f.coeffs) c = -0.05;
    CHECK(phase_mass(m, f) == doctest::Approx(-0.05).epsilon(1e-14));

    fill_nodal(&f, m, [](Vec2 p) { return p.x; });
    CHECK(phase_mass(m, f) == doctest::Approx(0.5).epsilon(1e-14));

    FieldVec g = f;
    for (size_t k = 0; k < g.coeffs.size(); ++k) g.coeffs[k] = 3.0 * f.coeffs[k] + 1.0;
    CHECK(phase_mass(m, g) == doctest::Approx(3.0 * 0.5 + 1.0).epsilon(1e-13));
}

TEST_CASE("eoc reproduces a known rate") {
    CHECK(eoc(0.1, 0.025, 0.5, 0.25) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eoc(0.1, 0.05, 0.5, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("field_error decays at interpolation rates") {
    auto value = [](Vec2 p, double v[2]) { v[0] = std::sin(2.0 * p.x + 1.0) * std::cos(p.y); };
    auto gradient = [](Vec2 p, Vec2 g[2]) {
        g[0] = {2.0 * std::cos(2.0 * p.x + 1.0) * std::cos(p.y),
                -std::sin(2.0 * p.x + 1.0) * std::sin(p.y)};
    };
    double l2[2], h1[2];
    const int res[] = {8, 16};
    for (int k = 0; k < 2; ++k) {
        const Mesh m = build_mesh({0, 1, 0, 1}, res[k], res[k]);
        FieldVec f = make_field(make_space(SpaceKind::P1Scalar, m));
        fill_nodal(&f, m, [&](Vec2 p) { return std::sin(2.0 * p.x + 1.0) * std::cos(p.y); });
        const ErrorNorms e = field_error(m, f, value, gradient);
        l2[k] = e.l2;
        h1[k] = e.h1semi;
    }
    const double rate_l2 = eoc(l2[0], l2[1], 1.0 / 8, 1.0 / 16);
    const double rate_h1 = eoc(h1[0], h1[1], 1.0 / 8, 1.0 / 16);
    CHECK(rate_l2 > 1.8);
    CHECK(rate_l2 < 2.2);
    CHECK(rate_h1 > 0.8);
    CHECK(rate_h1 < 1.2);

    // omitting the gradient closure leaves the seminorm at zero
    const Mesh m = build_mesh({0, 1, 0, 1}, 8, 8);
    FieldVec f = make_field(make_space(SpaceKind::P1Scalar, m));
    CHECK(field_error(m, f, value).h1semi == 0.0);
}

TEST_CASE("zero_mean_l2_error ignores constant offsets") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 8, 8);
    FieldVec f = make_field(make_space(SpaceKind::P1Scalar, m));
    fill_nodal(&f, m, [](Vec2 p) { return p.x + 10.0; });
    auto value = [](Vec2 p, double v[2]) { v[0] = p.x; };
    CHECK(zero_mean_l2_error(m, f, value) < 1e-13);
    // a genuine non-constant misfit stays visible
    fill_nodal(&f, m, [](Vec2 p) { return 2.0 * p.x; });
    CHECK(zero_mean_l2_error(m, f, value) > 0.1);
}

TEST_CASE("phase centroid of indicator regions") {
    const Mesh m = build_mesh({0, 1, 0, 1.5}, 24, 36);
    FieldVec f = make_field(make_space(SpaceKind::P1Scalar, m));

    for (double& c : f.coeffs) c = 1.0;
    const Vec2 c = phase_centroid(m, f);
    CHECK(c.x == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.y == doctest::Approx(0.75).epsilon(1e-13));

    for (double& v : f.coeffs) v = -1.0;
    CHECK_THROWS_AS(phase_centroid(m, f), Error);

    // tanh bubble: centroid lands near the prescribed center
    const Vec2 center{0.5, 0.6};
    fill_nodal(&f, m, [&](Vec2 p) { return bubble_initial_phase(p, center, 0.25, 0.02); });
    const Vec2 b = phase_centroid(m, f);
    CHECK(std::fabs(b.x - center.x) < 0.02);
    CHECK(std::fabs(b.y - center.y) < 0.02);
}

TEST_CASE("divergence residual flags compressible fields only") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 8, 8);
    const Space mini = make_space(SpaceKind::MiniVector2, m);

    FieldVec u = make_field(mini);
    for (int n = 0; n < m.n_nodes(); ++n) {
        u.coeffs[size_t(2 * n)] = 3.0;
        u.coeffs[size_t(2 * n + 1)] = -1.0;
    }
    CHECK(divergence_residual(m, u) < 1e-14);

    for (int n = 0; n < m.n_nodes(); ++n) u.coeffs[size_t(2 * n)] = m.nodes[size_t(n)].x;
    CHECK(divergence_residual(m, u) > 1e-4);
}

TEST_CASE("step dissipation budget") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 6, 6);
    const PhysParams prm = contrast_params();
    const double dt = 0.01;

    // identical zero states: every entry vanishes
    {
        const State z = make_state(m);
        const StepDissipation d = step_dissipation(m, prm, z, z, dt);
        CHECK(d.energy_change == 0.0);
        CHECK(d.kinetic_jump == 0.0);
        CHECK(d.viscous == 0.0);
        CHECK(d.magnetic_jump == 0.0);
        CHECK(d.ohmic == 0.0);
        CHECK(d.mobility == 0.0);
        CHECK(d.interface_jump == 0.0);
        CHECK(d.well_jump == 0.0);
        CHECK(d.well_mixed == 0.0);
        CHECK(d.well_quadratic == 0.0);
        CHECK(d.defect == 0.0);
    }

    // generic pair of states: dissipation entries are nonnegative and the
    // defect is exactly the energy change plus their sum
    {
        State a = make_state(m), b = make_state(m);
        fill_nodal(&a.phi, m, [](Vec2 p) { return 0.3 * std::sin(5.0 * p.x) * p.y; });
        fill_nodal(&b.phi, m, [](Vec2 p) { return 0.27 * std::sin(5.0 * p.x) * p.y - 0.01; });
        fill_nodal(&b.omega, m, [](Vec2 p) { return std::cos(3.0 * p.y) + p.x; });
        for (int n = 0; n < m.n_nodes(); ++n) {
            const Vec2 p = m.nodes[size_t(n)];
            b.vel.coeffs[size_t(2 * n)] = 0.1 * p.y;
            b.mag.coeffs[size_t(2 * n)] = 0.2 * p.x * p.y;
            a.mag.coeffs[size_t(2 * n + 1)] = 0.05;
        }
        const StepDissipation d = step_dissipation(m, prm, a, b, dt);
        CHECK(d.kinetic_jump > 0.0);
        CHECK(d.viscous > 0.0);
        CHECK(d.magnetic_jump > 0.0);
        CHECK(d.ohmic > 0.0);
        CHECK(d.mobility > 0.0);
        CHECK(d.interface_jump > 0.0);
        CHECK(d.well_jump > 0.0);
        CHECK(d.well_mixed > 0.0);
        CHECK(d.well_quadratic > 0.0);
        const double sum = d.kinetic_jump + d.viscous + d.magnetic_jump + d.ohmic +
                           d.mobility + d.interface_jump + d.well_jump + d.well_mixed +
                           d.well_quadratic;
        CHECK(d.defect == doctest::Approx(d.energy_change + sum).epsilon(1e-12));
    }
}
