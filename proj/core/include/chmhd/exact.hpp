// Closed-form reference solution for the convergence study, with every
// space/time derivative the forcing terms need. The fields are products of
// trigonometric factors on the unit square:
//   phi = cos(t) cos^2(pi x) cos^2(pi y)
//   u   = cos(t) ( pi sin(2 pi y) sin^2(pi x), -pi sin(2 pi x) sin^2(pi y) )
//   p   = cos(t) (2x - 2)(2y - 1)
//   B   = cos(t) ( sin(pi x) cos(pi y), -sin(pi y) cos(pi x) )
// and omega is the continuous chemical potential of phi. u vanishes on the
// boundary, phi has zero normal derivative, p has zero mean, and both u and
// B are divergence free.
#pragma once

#include "chmhd/physics.hpp"
#include "chmhd/util.hpp"

namespace chmhd {

// Everything at one point and time. Gradient conventions: grad_u[i][j] is
// the j-derivative of component i; curl of a 2-vector is the scalar
// d(B2)/dx - d(B1)/dy; curl of a scalar s is the vector (ds/dy, -ds/dx).
struct ExactState {
    double phi, phi_t;
    Vec2 grad_phi;
    double lap_phi;
    Vec2 grad_lap_phi;
    double bilap_phi;

    Vec2 u, u_t;
    Mat2 grad_u;
    Vec2 lap_u;

    double p;
    Vec2 grad_p;

    Vec2 B, B_t;
    Mat2 grad_B;
    double curl_B;
    Vec2 curl_curl_B;  // curl of the scalar curl_B

    double omega;
    Vec2 grad_omega;
    double lap_omega;
};

class ExactSolution {
  public:
    explicit ExactSolution(const PhysParams& params) : p_(params) {}

    ExactState eval(Vec2 x, double t) const;

    // Sources that make the exact fields satisfy the model equations; they
    // enter the momentum, induction, phase, and potential rows as (f, test)
    // loads. The derivation assumes spatially constant viscosity, mobility,
    // and conductivity (the convergence study uses matched pairs); density
    // may vary between the fluids.
    void forcing(Vec2 x, double t, Vec2* f_u, Vec2* f_B, double* f_phi, double* f_omega) const;

    const PhysParams& params() const { return p_; }

  private:
    PhysParams p_;
};

}  // namespace chmhd
