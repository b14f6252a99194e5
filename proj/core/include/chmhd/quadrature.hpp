// Triangle quadrature. One baseline rule is used everywhere (assembly,
// norms, energy bookkeeping): the 7-point degree-5 rule. Sharing a single
// rule is load-bearing: the discrete energy identity only telescopes exactly
// when every inner product is evaluated with the same points and weights.
#pragma once

#include <array>

namespace chmhd {

struct QuadPoint {
    double l0, l1, l2;  // barycentric coordinates
    double w;           // reference weight; all weights sum to 1/2
};

struct QuadRule {
    const QuadPoint* pts;
    int n;
};

// 7-point rule, exact for polynomials of total degree <= 5.
QuadRule tri_quadrature();

// Exact integral of l0^a * l1^b * l2^c over a triangle of area A:
// a! b! c! * 2A / (a+b+c+2)!. Oracle for exactness tests.
double bary_monomial_integral(int a, int b, int c, double area);

}  // namespace chmhd
