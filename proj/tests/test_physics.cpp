// Coefficient laws, the double-well split, and the canned initial phase
// fields (seeded noise and the bubble profile).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chmhd/diagnostics.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/physics.hpp"
#include "chmhd/util.hpp"

using namespace chmhd;

namespace {

PhysParams two_fluid() {
    PhysParams p;
    p.rho1 = 1.0;
    p.rho2 = 9.0;
    p.eta1 = 0.1;
    p.eta2 = 0.2;
    p.sigma1 = 3.0;
    p.sigma2 = 5.0;
    p.m1 = 1e-4;
    p.m2 = 5e-4;
    return p;
}

}  // namespace

TEST_CASE("cut_off clips to the phase interval") {
    CHECK(cut_off(-3.0) == -1.0);
    CHECK(cut_off(1.5) == 1.0);
    CHECK(cut_off(0.37) == 0.37);
    CHECK(cut_off(-1.0) == -1.0);
    CHECK(cut_off(1.0) == 1.0);
}

TEST_CASE("coefficient laws hit their endpoints exactly") {
    const PhysParams p = two_fluid();
    CHECK(coeff_eval(CoeffKind::Density, p, -1.0) == 1.0);
    CHECK(coeff_eval(CoeffKind::Density, p, 1.0) == 9.0);
    CHECK(coeff_eval(CoeffKind::Density, p, 0.0) == 5.0);
    CHECK(coeff_eval(CoeffKind::Viscosity, p, -1.0) == 0.1);
    CHECK(coeff_eval(CoeffKind::Viscosity, p, 1.0) == 0.2);
    CHECK(coeff_eval(CoeffKind::Conductivity, p, 1.0) == 5.0);
    CHECK(coeff_eval(CoeffKind::Mobility, p, -1.0) == 1e-4);
    CHECK(coeff_slope(CoeffKind::Density, p) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(coeff_slope(CoeffKind::Mobility, p) == doctest::Approx(2e-4).epsilon(1e-15));
}

TEST_CASE("coefficient laws stay within their bounds on the whole interval") {
    const PhysParams p = two_fluid();
    const CoeffKind kinds[] = {CoeffKind::Density, CoeffKind::Viscosity,
                               CoeffKind::Conductivity, CoeffKind::Mobility};
    for (const CoeffKind k : kinds) {
        double lo = 0, hi = 0;
        coeff_bounds(k, p, &lo, &hi);
        CHECK(lo > 0);
        CHECK(hi >= lo);
        for (int i = 0; i <= 200; ++i) {
            const double phi = -1.0 + 2.0 * i / 200.0;
            const double c = coeff_eval(k, p, phi);
            CHECK(c >= lo);
            CHECK(c <= hi);
        }
    }
}

TEST_CASE("parameter validation rejects nonpositive entries") {
    PhysParams p = two_fluid();
    CHECK_NOTHROW(p.validate());
    p.rho1 = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = two_fluid();
    p.epsilon = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("double-well anchors and derivative") {
    CHECK(double_well_F(0.0) == 0.25);
    CHECK(double_well_F(1.0) == 0.0);
    CHECK(double_well_F(-1.0) == 0.0);
    UniformRng rng(5);
    for (int i = 0; i < 50; ++i) {
        const double x = 2.0 * rng.next_symmetric();
        const double h = 1e-6;
        const double fd = (double_well_F(x + h) - double_well_F(x - h)) / (2.0 * h);
        CHECK(std::fabs(fd - double_well_f(x)) < 1e-6 * (1.0 + std::fabs(double_well_f(x))));
    }
}

TEST_CASE("the split derivative obeys the stability identity") {
    // (a^3 - b)(a - b) = F(a) - F(b) + 1/4 (a^2-b^2)^2
    //                  + 1/2 a^2 (a-b)^2 + 1/2 (a-b)^2
    // which is what makes the semi-implicit well update dissipative.
    UniformRng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double a = 2.0 * rng.next_symmetric();
        const double b = 2.0 * rng.next_symmetric();
        CHECK(convex_split_f(a, b) == a * a * a - b);
        const double lhs = convex_split_f(a, b) * (a - b);
        const double d = a - b, s = a * a - b * b;
        const double rhs = double_well_F(a) - double_well_F(b) + 0.25 * s * s +
                           0.5 * a * a * d * d + 0.5 * d * d;
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)));
    }
}

TEST_CASE("spinodal noise is mean free, bounded, and seeded") {
    const Mesh m = build_mesh({0, 1, 0, 1}, 16, 16);
    const FieldVec f = spinodal_initial_phase(m, 2026);
    REQUIRE(int(f.coeffs.size()) == m.n_nodes());

    double plain_mean = 0;
    for (const double v : f.coeffs) {
        plain_mean += v + 0.05;
        CHECK(std::fabs(v + 0.05) <= 0.001 * (1.0 + 1e-12));
        CHECK(std::fabs(v) <= 1.0);
    }
    CHECK(std::fabs(plain_mean) < 1e-12 * m.n_nodes());

    // the projection also zeroes the mass-weighted mean, so the integral of
    // the initial phase is exactly the base level times the area
    CHECK(std::fabs(phase_mass(m, f) + 0.05 * m.rect.area()) < 1e-13);

    const FieldVec again = spinodal_initial_phase(m, 2026);
    CHECK(f.coeffs == again.coeffs);
    const FieldVec other = spinodal_initial_phase(m, 2027);
    CHECK(f.coeffs != other.coeffs);
}

TEST_CASE("bubble profile is a signed distance tanh") {
    const Vec2 c{0.5, 0.3};
    const double R = 0.2, eps = 0.01;
    CHECK(bubble_initial_phase(c, c, R, eps) ==
          doctest::Approx(std::tanh(R / (std::sqrt(2.0) * eps))).epsilon(1e-14));
    // zero level set on the circle, signs inside and out
    CHECK(std::fabs(bubble_initial_phase({0.5 + R, 0.3}, c, R, eps)) < 1e-14);
    CHECK(bubble_initial_phase({0.5, 0.35}, c, R, eps) > 0.99);
    CHECK(bubble_initial_phase({0.9, 0.9}, c, R, eps) < -0.99);
}
