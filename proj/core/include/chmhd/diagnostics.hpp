// Discrete functionals of simulation states: the energy and its parts, phase
// mass, error norms against analytic fields, convergence rates, the centroid
// of the positive-phase region, the weak divergence residual, and the
// per-step dissipation audit matching the stability budget of the stepper.
#pragma once

#include <functional>

#include "chmhd/assembly.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/physics.hpp"
#include "chmhd/scheme.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

struct EnergyBreakdown {
    double kinetic = 0, magnetic = 0, interface = 0, well = 0;
    double total = 0;
};

// E = 1/2 (rho^(phi) u, u) + 1/(2 mu) |B|^2 + gamma eps/2 |grad phi|^2
//   + gamma/(4 eps) |phi^2 - 1|^2, all by the shared element quadrature.
EnergyBreakdown discrete_energy(const Mesh& mesh, const PhysParams& params, const State& s);

// Integral of the phase field over the domain.
double phase_mass(const Mesh& mesh, const FieldVec& phi);

// Component gradients of an analytic comparison field; scalar fields fill
// grad[0] only.
using AnalyticGradFn = std::function<void(Vec2 p, Vec2 grad[2])>;

struct ErrorNorms {
    double l2 = 0;
    double h1semi = 0;
};

// L2 and H1-seminorm distance between a finite element field and an analytic
// one. A null gradient closure leaves h1semi at zero.
ErrorNorms field_error(const Mesh& mesh, const FieldVec& f, const AnalyticFn& value,
                       const AnalyticGradFn& grad = nullptr);

// L2 distance after shifting the difference to zero mean, which is the right
// comparison for the pressure (determined only up to a constant).
double zero_mean_l2_error(const Mesh& mesh, const FieldVec& f, const AnalyticFn& value);

// Observed convergence order between two refinement levels.
double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine);

// Area centroid of the region phi > 0, by quadrature indicator. Throws if
// the region has zero measure.
Vec2 phase_centroid(const Mesh& mesh, const FieldVec& phi);

// max_i |(div u, psi_i)| over the scalar nodal basis.
double divergence_residual(const Mesh& mesh, const FieldVec& vel);

// One time step's energy budget. Every term after energy_change is a
// nonnegative dissipation contribution; defect is their sum plus the energy
// change, which the stepper keeps near zero (it would vanish exactly if the
// kinetic convective terms telescoped in the discrete spaces).
struct StepDissipation {
    double energy_change = 0;
    double kinetic_jump = 0;     // 1/2 (rho^k |u' - u^k|^2)
    double viscous = 0;          // 2 dt (eta_k D(u'), D(u'))
    double magnetic_jump = 0;    // 1/(2 mu) |B' - B^k|^2
    double ohmic = 0;            // dt/mu^2 (1/sigma_k, |curl B'|^2 + |div B'|^2)
    double mobility = 0;         // dt (M_k grad omega', grad omega')
    double interface_jump = 0;   // gamma eps/2 |grad(phi' - phi^k)|^2
    double well_jump = 0;        // gamma/(4 eps) |phi'^2 - phi^k^2|^2
    double well_mixed = 0;       // gamma/(2 eps) (phi'^2, (phi' - phi^k)^2)
    double well_quadratic = 0;   // gamma/(2 eps) |phi' - phi^k|^2
    double defect = 0;
};
StepDissipation step_dissipation(const Mesh& mesh, const PhysParams& params, const State& prev,
                                 const State& next, double dt);

}  // namespace chmhd
