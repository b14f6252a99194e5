#include "chmhd/quadrature.hpp"

#include <cmath>

namespace chmhd {

namespace {

// Degree-5 rule: centroid plus two three-point orbits. Barycentric
// coordinates a = (9 -+ 2*sqrt(15))/21 with the complementary pair
// b = (6 +- sqrt(15))/21, weights (155 +- sqrt(15))/2400 (reference
// triangle of area 1/2; centroid weight 9/80).
constexpr double SQ15 = 3.8729833462074168852;  // sqrt(15)
constexpr double A1 = (9.0 - 2.0 * SQ15) / 21.0;
constexpr double B1 = (6.0 + SQ15) / 21.0;
constexpr double W1 = (155.0 + SQ15) / 2400.0;
constexpr double A2 = (9.0 + 2.0 * SQ15) / 21.0;
constexpr double B2 = (6.0 - SQ15) / 21.0;
constexpr double W2 = (155.0 - SQ15) / 2400.0;

constexpr QuadPoint RULE7[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 80.0},
    {A1, B1, B1, W1},
    {B1, A1, B1, W1},
    {B1, B1, A1, W1},
    {A2, B2, B2, W2},
    {B2, A2, B2, W2},
    {B2, B2, A2, W2},
};

}  // namespace

QuadRule tri_quadrature() { return {RULE7, 7}; }

double bary_monomial_integral(int a, int b, int c, double area) {
    // a! b! c! / (a+b+c+2)! computed incrementally to avoid overflow.
    double v = 1.0;
    int denom = 1;
    auto mul_factorial_ratio = [&](int k) {
        for (int i = 1; i <= k; ++i) {
            v *= static_cast<double>(i) / static_cast<double>(denom + 1);
            ++denom;
        }
    };
    denom = 0;
    mul_factorial_ratio(a);
    mul_factorial_ratio(b);
    mul_factorial_ratio(c);
    // denom is now a+b+c; extend the denominator to (a+b+c+2)!.
    v /= static_cast<double>(denom + 1);
    v /= static_cast<double>(denom + 2);
    return v * 2.0 * area;
}

}  // namespace chmhd
