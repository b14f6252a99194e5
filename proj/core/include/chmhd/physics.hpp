// Model coefficients and closures: the two-fluid parameter set, affine
// coefficient laws over the clipped phase variable, the double-well
// potential with its convex splitting, and experiment initial data.
#pragma once

#include <cstdint>

#include "chmhd/assembly.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/spaces.hpp"
#include "chmhd/util.hpp"

namespace chmhd {

struct PhysParams {
    double rho1 = 1.0, rho2 = 1.0;      // densities of fluid I (phi=-1) / fluid II (phi=+1)
    double eta1 = 1.0, eta2 = 1.0;      // viscosities
    double sigma1 = 1.0, sigma2 = 1.0;  // electric conductivities
    double m1 = 1.0, m2 = 1.0;          // mobilities
    double mu = 1.0;                    // magnetic permeability (single-valued)
    double gamma = 1.0;                 // surface tension coefficient
    double epsilon = 1.0;               // interface thickness
    double lambda = 1.0;                // scaling of the capillary force in the momentum row
    Vec2 gravity{0.0, 0.0};

    void validate() const;  // throws if a positivity invariant is violated
};

enum class CoeffKind { Density, Viscosity, Conductivity, Mobility };

// Clip to [-1, 1]; identity inside. Applied to the phase variable before any
// coefficient evaluation so the affine laws stay within their fluid bounds.
inline double cut_off(double phi) { return phi < -1.0 ? -1.0 : (phi > 1.0 ? 1.0 : phi); }

// Affine blend c(phi) = ((c2-c1)/2) phi + (c1+c2)/2, written as a convex
// combination so the endpoint bounds hold to rounding. Callers pass the
// cut-off phase value; raw values are only valid where the scheme uses the
// raw previous-step field (transport terms), which never call this.
double coeff_eval(CoeffKind kind, const PhysParams& p, double phi_cut);

// Per-coefficient slope (c2-c1)/2, the derivative of the law inside |phi|<1.
double coeff_slope(CoeffKind kind, const PhysParams& p);
void coeff_bounds(CoeffKind kind, const PhysParams& p, double* lo, double* hi);

// F(phi) = (1/4)(phi^2-1)^2 and the semi-implicit split of its derivative.
inline double double_well_F(double phi) {
    double s = phi * phi - 1.0;
    return 0.25 * s * s;
}
inline double double_well_f(double phi) { return phi * phi * phi - phi; }
inline double convex_split_f(double phi_new, double phi_old) {
    return phi_new * phi_new * phi_new - phi_old;
}

// Spinodal initial phase field: -0.05 plus 0.001-amplitude seeded noise.
// The noise is projected so that both its plain nodal mean and its
// mass-weighted mean vanish (the integral of phi0 is then exactly
// -0.05*|Omega|) and rescaled so every sample stays within [-1, 1].
FieldVec spinodal_initial_phase(const Mesh& mesh, std::uint64_t seed);

// Bubble initial phase field value at a point: tanh((R - |x-c|)/(sqrt(2) eps)).
double bubble_initial_phase(Vec2 p, Vec2 center, double radius, double epsilon);

}  // namespace chmhd
