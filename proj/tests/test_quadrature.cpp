// The shared 7-point triangle rule against the closed-form integral of
// barycentric monomials: exact through total degree 5, inexact at 6.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chmhd/quadrature.hpp"

using namespace chmhd;

namespace {

double rule_integral(int a, int b, int c, double area) {
    const QuadRule r = tri_quadrature();
    double s = 0;
    for (int q = 0; q < r.n; ++q) {
        const QuadPoint& p = r.pts[q];
        s += p.w * std::pow(p.l0, a) * std::pow(p.l1, b) * std::pow(p.l2, c);
    }
    return 2.0 * area * s;
}

}  // namespace

TEST_CASE("weights are positive and sum to the reference area") {
    const QuadRule r = tri_quadrature();
    REQUIRE(r.n == 7);
    double s = 0;
    for (int q = 0; q < r.n; ++q) {
        CHECK(r.pts[q].w > 0);
        CHECK(r.pts[q].l0 >= 0);
        CHECK(r.pts[q].l1 >= 0);
        CHECK(r.pts[q].l2 >= 0);
        CHECK(std::fabs(r.pts[q].l0 + r.pts[q].l1 + r.pts[q].l2 - 1.0) < 1e-15);
        s += r.pts[q].w;
    }
    CHECK(s == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("closed-form monomial integrals have the right anchors") {
    CHECK(bary_monomial_integral(0, 0, 0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bary_monomial_integral(1, 0, 0, 0.5) == doctest::Approx(0.5 / 3).epsilon(1e-15));
    CHECK(bary_monomial_integral(1, 1, 0, 0.5) == doctest::Approx(1.0 / 24).epsilon(1e-15));
    // a! b! c! 2A / (a+b+c+2)! with a = b = c = 1: 2A / 120
    CHECK(bary_monomial_integral(1, 1, 1, 3.0) == doctest::Approx(6.0 / 120).epsilon(1e-15));
}

TEST_CASE("every monomial up to total degree 5 integrates exactly") {
    const double areas[] = {0.5, 1.73};
    for (const double A : areas)
        for (int a = 0; a <= 5; ++a)
            for (int b = 0; a + b <= 5; ++b)
                for (int c = 0; a + b + c <= 5; ++c) {
                    const double exact = bary_monomial_integral(a, b, c, A);
                    const double got = rule_integral(a, b, c, A);
                    CHECK(std::fabs(got - exact) <= 1e-14 * (1.0 + std::fabs(exact)));
                }
}

TEST_CASE("degree six is not integrated exactly") {
    const double exact = bary_monomial_integral(6, 0, 0, 0.5);
    const double got = rule_integral(6, 0, 0, 0.5);
    CHECK(std::fabs(got - exact) > 1e-8);
}
