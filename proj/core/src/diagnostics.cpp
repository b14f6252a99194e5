// Quadrature loops for the state functionals. These share the element rule
// with the stepper so that conserved and dissipated quantities are measured
// in exactly the arithmetic the scheme controls.
#include "chmhd/diagnostics.hpp"

#include <cmath>

#include "chmhd/quadrature.hpp"

namespace chmhd {

namespace {

// Runs fn(tri, geom, qp, weight, point) over every quadrature point.
template <typename F>
void for_each_quad_point(const Mesh& mesh, F&& fn) {
    const QuadRule rule = tri_quadrature();
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const TriGeom g = tri_geometry(mesh, t);
        for (int q = 0; q < rule.n; ++q) {
            const QuadPoint& qp = rule.pts[size_t(q)];
            fn(t, g, qp, 2.0 * g.area * qp.w);
        }
    }
}

}  // namespace

EnergyBreakdown discrete_energy(const Mesh& mesh, const PhysParams& params, const State& s) {
    EnergyBreakdown e;
    const double inv_2mu = 0.5 / params.mu;
    const double half_geps = 0.5 * params.gamma * params.epsilon;
    const double quarter_goeps = 0.25 * params.gamma / params.epsilon;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        double u[2], B[2], phi[2];
        Vec2 gphi[2];
        eval_field_local(s.vel, mesh, g, t, qp.l0, qp.l1, qp.l2, u);
        eval_field_local(s.mag, mesh, g, t, qp.l0, qp.l1, qp.l2, B);
        eval_field_local(s.phi, mesh, g, t, qp.l0, qp.l1, qp.l2, phi, gphi);
        const double rho = coeff_eval(CoeffKind::Density, params, cut_off(phi[0]));
        e.kinetic += W * 0.5 * rho * (u[0] * u[0] + u[1] * u[1]);
        e.magnetic += W * inv_2mu * (B[0] * B[0] + B[1] * B[1]);
        e.interface += W * half_geps * (gphi[0].x * gphi[0].x + gphi[0].y * gphi[0].y);
        const double dev = phi[0] * phi[0] - 1.0;
        e.well += W * quarter_goeps * dev * dev;
    });
    e.total = e.kinetic + e.magnetic + e.interface + e.well;
    return e;
}

double phase_mass(const Mesh& mesh, const FieldVec& phi) {
    double m = 0.0;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        double v[2];
        eval_field_local(phi, mesh, g, t, qp.l0, qp.l1, qp.l2, v);
        m += W * v[0];
    });
    return m;
}

ErrorNorms field_error(const Mesh& mesh, const FieldVec& f, const AnalyticFn& value,
                       const AnalyticGradFn& grad) {
    CHMHD_REQUIRE(bool(value), "field_error needs a comparison value");
    const int nc = f.space.kind == SpaceKind::P1Scalar ? 1 : 2;
    double l2 = 0.0, h1 = 0.0;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        const Vec2 x = bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2);
        double vh[2];
        Vec2 gh[2];
        eval_field_local(f, mesh, g, t, qp.l0, qp.l1, qp.l2, vh, grad ? gh : nullptr);
        double vx[2] = {0, 0};
        value(x, vx);
        for (int c = 0; c < nc; ++c) {
            const double d = vh[c] - vx[c];
            l2 += W * d * d;
        }
        if (grad) {
            Vec2 gx[2] = {{0, 0}, {0, 0}};
            grad(x, gx);
            for (int c = 0; c < nc; ++c) {
                const Vec2 d = gh[c] - gx[c];
                h1 += W * (d.x * d.x + d.y * d.y);
            }
        }
    });
    return {std::sqrt(l2), std::sqrt(h1)};
}

double zero_mean_l2_error(const Mesh& mesh, const FieldVec& f, const AnalyticFn& value) {
    CHMHD_REQUIRE(bool(value), "zero_mean_l2_error needs a comparison value");
    // Two passes: subtracting the mean before squaring keeps a pure constant
    // offset at roundoff instead of cancelling two large sums against each
    // other.
    double sd = 0.0;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        const Vec2 x = bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2);
        double vh[2];
        eval_field_local(f, mesh, g, t, qp.l0, qp.l1, qp.l2, vh);
        double vx[2] = {0, 0};
        value(x, vx);
        sd += W * (vh[0] - vx[0]);
    });
    const double mean = sd / mesh.rect.area();
    double sq = 0.0;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        const Vec2 x = bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2);
        double vh[2];
        eval_field_local(f, mesh, g, t, qp.l0, qp.l1, qp.l2, vh);
        double vx[2] = {0, 0};
        value(x, vx);
        const double d = vh[0] - vx[0] - mean;
        sq += W * d * d;
    });
    return std::sqrt(sq);
}

double eoc(double err_coarse, double err_fine, double h_coarse, double h_fine) {
    CHMHD_REQUIRE(err_coarse > 0.0 && err_fine > 0.0, "convergence rate needs positive errors");
    CHMHD_REQUIRE(h_coarse > h_fine && h_fine > 0.0, "mesh sizes must decrease");
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

Vec2 phase_centroid(const Mesh& mesh, const FieldVec& phi) {
    double area = 0.0;
    Vec2 first{0, 0};
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        double v[2];
        eval_field_local(phi, mesh, g, t, qp.l0, qp.l1, qp.l2, v);
        if (v[0] > 0.0) {
            const Vec2 x = bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2);
            area += W;
            first = first + W * x;
        }
    });
    CHMHD_REQUIRE(area > 0.0, "positive-phase region is empty");
    return (1.0 / area) * first;
}

double divergence_residual(const Mesh& mesh, const FieldVec& vel) {
    CHMHD_REQUIRE(vel.space.kind == SpaceKind::MiniVector2, "expected a velocity field");
    std::vector<double> r(size_t(mesh.n_nodes()), 0.0);
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        double v[2];
        Vec2 gv[2];
        eval_field_local(vel, mesh, g, t, qp.l0, qp.l1, qp.l2, v, gv);
        const double div = gv[0].x + gv[1].y;
        const double lv[3] = {qp.l0, qp.l1, qp.l2};
        for (int i = 0; i < 3; ++i) r[size_t(mesh.tris[size_t(t)][size_t(i)])] += W * div * lv[i];
    });
    double m = 0.0;
    for (double v : r) m = std::max(m, std::fabs(v));
    return m;
}

StepDissipation step_dissipation(const Mesh& mesh, const PhysParams& params, const State& prev,
                                 const State& next, double dt) {
    CHMHD_REQUIRE(dt > 0.0, "time step must be positive");
    StepDissipation d;
    const double inv_2mu = 0.5 / params.mu;
    const double geps = params.gamma * params.epsilon;
    const double goeps = params.gamma / params.epsilon;
    for_each_quad_point(mesh, [&](int t, const TriGeom& g, const QuadPoint& qp, double W) {
        double up[2], un[2], Bp[2], Bn[2], phip[2], phin[2], omn[2];
        Vec2 gun[2], gBn[2], gphip[2], gphin[2], gomn[2];
        eval_field_local(prev.vel, mesh, g, t, qp.l0, qp.l1, qp.l2, up);
        eval_field_local(next.vel, mesh, g, t, qp.l0, qp.l1, qp.l2, un, gun);
        eval_field_local(prev.mag, mesh, g, t, qp.l0, qp.l1, qp.l2, Bp);
        eval_field_local(next.mag, mesh, g, t, qp.l0, qp.l1, qp.l2, Bn, gBn);
        eval_field_local(prev.phi, mesh, g, t, qp.l0, qp.l1, qp.l2, phip, gphip);
        eval_field_local(next.phi, mesh, g, t, qp.l0, qp.l1, qp.l2, phin, gphin);
        eval_field_local(next.omega, mesh, g, t, qp.l0, qp.l1, qp.l2, omn, gomn);

        const double chi = cut_off(phip[0]);
        const double rho_k = coeff_eval(CoeffKind::Density, params, chi);
        const double eta_k = coeff_eval(CoeffKind::Viscosity, params, chi);
        const double sig_k = coeff_eval(CoeffKind::Conductivity, params, chi);
        const double mob_k = coeff_eval(CoeffKind::Mobility, params, chi);

        const double du0 = un[0] - up[0], du1 = un[1] - up[1];
        d.kinetic_jump += W * 0.5 * rho_k * (du0 * du0 + du1 * du1);

        const double d01 = 0.5 * (gun[0].y + gun[1].x);
        d.viscous += W * 2.0 * dt * eta_k *
                     (gun[0].x * gun[0].x + gun[1].y * gun[1].y + 2.0 * d01 * d01);

        const double dB0 = Bn[0] - Bp[0], dB1 = Bn[1] - Bp[1];
        d.magnetic_jump += W * inv_2mu * (dB0 * dB0 + dB1 * dB1);

        const double curl = gBn[1].x - gBn[0].y;
        const double div = gBn[0].x + gBn[1].y;
        d.ohmic += W * dt / (params.mu * params.mu * sig_k) * (curl * curl + div * div);

        d.mobility += W * dt * mob_k * (gomn[0].x * gomn[0].x + gomn[0].y * gomn[0].y);

        const Vec2 dg = gphin[0] - gphip[0];
        d.interface_jump += W * 0.5 * geps * (dg.x * dg.x + dg.y * dg.y);

        const double dphi = phin[0] - phip[0];
        const double sq_jump = phin[0] * phin[0] - phip[0] * phip[0];
        d.well_jump += W * 0.25 * goeps * sq_jump * sq_jump;
        d.well_mixed += W * 0.5 * goeps * phin[0] * phin[0] * dphi * dphi;
        d.well_quadratic += W * 0.5 * goeps * dphi * dphi;
    });
    d.energy_change = discrete_energy(mesh, params, next).total -
                      discrete_energy(mesh, params, prev).total;
    d.defect = d.energy_change + d.kinetic_jump + d.viscous + d.magnetic_jump + d.ohmic +
               d.mobility + d.interface_jump + d.well_jump + d.well_mixed + d.well_quadratic;
    return d;
}

}  // namespace chmhd
