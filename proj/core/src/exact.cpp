#include "chmhd/exact.hpp"

#include <cmath>

namespace chmhd {

namespace {
constexpr double PI = 3.14159265358979323846;
}

ExactState ExactSolution::eval(Vec2 xy, double t) const {
    const double x = xy.x, y = xy.y;
    const double c = std::cos(t), s = std::sin(t);
    const double cx = std::cos(PI * x), sx = std::sin(PI * x);
    const double cy = std::cos(PI * y), sy = std::sin(PI * y);
    const double c2x = std::cos(2 * PI * x), s2x = std::sin(2 * PI * x);
    const double c2y = std::cos(2 * PI * y), s2y = std::sin(2 * PI * y);
    const double cx2 = cx * cx, cy2 = cy * cy, sx2 = sx * sx, sy2 = sy * sy;
    const double P2 = PI * PI, P3 = P2 * PI, P4 = P3 * PI;

    ExactState e{};

    // phase field and its derivatives
    e.phi = c * cx2 * cy2;
    e.phi_t = -s * cx2 * cy2;
    e.grad_phi = {-PI * c * s2x * cy2, -PI * c * cx2 * s2y};
    e.lap_phi = -2 * P2 * c * (c2x * cy2 + cx2 * c2y);
    e.grad_lap_phi = {2 * P3 * c * s2x * (2 * cy2 + c2y), 2 * P3 * c * s2y * (2 * cx2 + c2x)};
    e.bilap_phi = 4 * P4 * c * (c2x * (2 * cy2 + c2y) + c2y * (2 * cx2 + c2x));

    // velocity (divergence free stream-function form)
    e.u = {PI * c * s2y * sx2, -PI * c * s2x * sy2};
    e.u_t = {-PI * s * s2y * sx2, PI * s * s2x * sy2};
    e.grad_u[0][0] = P2 * c * s2x * s2y;
    e.grad_u[0][1] = 2 * P2 * c * c2y * sx2;
    e.grad_u[1][0] = -2 * P2 * c * c2x * sy2;
    e.grad_u[1][1] = -P2 * c * s2x * s2y;
    e.lap_u = {2 * P3 * c * s2y * (c2x - 2 * sx2), 2 * P3 * c * s2x * (2 * sy2 - c2y)};

    // pressure (zero mean on the unit square)
    e.p = c * (2 * x - 2) * (2 * y - 1);
    e.grad_p = {2 * c * (2 * y - 1), 2 * c * (2 * x - 2)};

    // magnetic field (divergence free)
    e.B = {c * sx * cy, -c * sy * cx};
    e.B_t = {-s * sx * cy, s * sy * cx};
    e.grad_B[0][0] = PI * c * cx * cy;
    e.grad_B[0][1] = -PI * c * sx * sy;
    e.grad_B[1][0] = PI * c * sx * sy;
    e.grad_B[1][1] = -PI * c * cx * cy;
    e.curl_B = 2 * PI * c * sx * sy;
    e.curl_curl_B = {2 * P2 * c * sx * cy, -2 * P2 * c * cx * sy};

    // chemical potential from the continuous double-well derivative
    const double ge = p_.gamma * p_.epsilon;
    const double goe = p_.gamma / p_.epsilon;
    const double fp = 3 * e.phi * e.phi - 1.0;  // f'(phi)
    e.omega = -ge * e.lap_phi + goe * double_well_f(e.phi);
    e.grad_omega = -ge * e.grad_lap_phi + goe * fp * e.grad_phi;
    e.lap_omega = -ge * e.bilap_phi +
                  goe * (fp * e.lap_phi + 6 * e.phi * dot(e.grad_phi, e.grad_phi));
    return e;
}

void ExactSolution::forcing(Vec2 xy, double t, Vec2* f_u, Vec2* f_B, double* f_phi,
                            double* f_omega) const {
    const ExactState e = eval(xy, t);
    const double rho = coeff_eval(CoeffKind::Density, p_, cut_off(e.phi));
    const double drho = coeff_slope(CoeffKind::Density, p_);
    const double eta = p_.eta1;    // constant by precondition
    const double M = p_.m1;        // constant by precondition
    const double sigma = p_.sigma1;

    // momentum: time term of (rho u), conservative convection, mass-flux
    // convection, viscosity, pressure, Lorentz coupling, capillary force
    Vec2 conv{e.grad_u[0][0] * e.u.x + e.grad_u[0][1] * e.u.y,
              e.grad_u[1][0] * e.u.x + e.grad_u[1][1] * e.u.y};
    Vec2 flux_conv{e.grad_u[0][0] * e.grad_omega.x + e.grad_u[0][1] * e.grad_omega.y,
                   e.grad_u[1][0] * e.grad_omega.x + e.grad_u[1][1] * e.grad_omega.y};
    double gphi_u = dot(e.grad_phi, e.u);
    for (int i = 0; i < 2; ++i) {
        (*f_u)[i] = drho * e.phi_t * e.u[i] + rho * e.u_t[i]      // d/dt (rho u)
                    + rho * conv[i] + drho * gphi_u * e.u[i]       // div(rho u (x) u)
                    - drho * M * (flux_conv[i] + e.u[i] * e.lap_omega)
                    - eta * e.lap_u[i] + e.grad_p[i]
                    + (1.0 / p_.mu) * e.curl_B * (i == 0 ? e.B.y : -e.B.x)
                    + p_.lambda * e.phi * e.grad_omega[i];
    }

    // induction: the advection source needs curl(u x B); build the scalar
    // s = u1 B2 - u2 B1 derivatives from the product rule.
    double sx = e.grad_u[0][0] * e.B.y + e.u.x * e.grad_B[1][0] -
                e.grad_u[1][0] * e.B.x - e.u.y * e.grad_B[0][0];
    double sy = e.grad_u[0][1] * e.B.y + e.u.x * e.grad_B[1][1] -
                e.grad_u[1][1] * e.B.x - e.u.y * e.grad_B[0][1];
    (*f_B).x = e.B_t.x + e.curl_curl_B.x / (p_.mu * sigma) - sy;
    (*f_B).y = e.B_t.y + e.curl_curl_B.y / (p_.mu * sigma) - (-sx);

    *f_phi = e.phi_t + dot(e.u, e.grad_phi) - M * e.lap_omega;
    *f_omega = 0.0;
}

}  // namespace chmhd
