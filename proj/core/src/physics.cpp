#include "chmhd/physics.hpp"

#include <algorithm>
#include <cmath>

namespace chmhd {

void PhysParams::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0)) throw Error(std::string("parameter must be strictly positive: ") + name);
    };
    pos(rho1, "rho1");
    pos(rho2, "rho2");
    pos(eta1, "eta1");
    pos(eta2, "eta2");
    pos(sigma1, "sigma1");
    pos(sigma2, "sigma2");
    pos(m1, "m1");
    pos(m2, "m2");
    pos(mu, "mu");
    pos(gamma, "gamma");
    pos(epsilon, "epsilon");
}

static void coeff_pair(CoeffKind kind, const PhysParams& p, double* c1, double* c2) {
    switch (kind) {
        case CoeffKind::Density: *c1 = p.rho1; *c2 = p.rho2; return;
        case CoeffKind::Viscosity: *c1 = p.eta1; *c2 = p.eta2; return;
        case CoeffKind::Conductivity: *c1 = p.sigma1; *c2 = p.sigma2; return;
        case CoeffKind::Mobility: *c1 = p.m1; *c2 = p.m2; return;
    }
}

double coeff_eval(CoeffKind kind, const PhysParams& p, double phi_cut) {
    double c1, c2;
    coeff_pair(kind, p, &c1, &c2);
    // Convex-combination form: for phi in [-1,1] the weights are nonnegative
    // and the result cannot leave [min(c1,c2), max(c1,c2)] by more than
    // rounding dust.
    return 0.5 * (c1 * (1.0 - phi_cut) + c2 * (1.0 + phi_cut));
}

double coeff_slope(CoeffKind kind, const PhysParams& p) {
    double c1, c2;
    coeff_pair(kind, p, &c1, &c2);
    return 0.5 * (c2 - c1);
}

void coeff_bounds(CoeffKind kind, const PhysParams& p, double* lo, double* hi) {
    double c1, c2;
    coeff_pair(kind, p, &c1, &c2);
    *lo = std::min(c1, c2);
    *hi = std::max(c1, c2);
}

FieldVec spinodal_initial_phase(const Mesh& mesh, std::uint64_t seed) {
    const int n = mesh.n_nodes();

    // Lumped node masses m_i = integral of the P1 hat function: one third of
    // the area of each incident triangle.
    std::vector<double> m(n, 0.0);
    for (int t = 0; t < mesh.n_tris(); ++t) {
        double a3 = tri_geometry(mesh, t).area / 3.0;
        for (int v : mesh.tris[t]) m[v] += a3;
    }

    UniformRng rng(seed);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = rng.next_symmetric();

    // Remove the component of r along both 1 and m (Gram solve), so the
    // noise has zero nodal mean and zero integral.
    double s1 = 0.0, sm = 0.0, smm = 0.0, sr = 0.0, smr = 0.0;
    for (int i = 0; i < n; ++i) {
        s1 += 1.0;
        sm += m[i];
        smm += m[i] * m[i];
        sr += r[i];
        smr += m[i] * r[i];
    }
    double det = s1 * smm - sm * sm;
    CHMHD_CHECK(det > 0.0, "degenerate node-mass Gram matrix");
    double alpha = (sr * smm - smr * sm) / det;
    double beta = (s1 * smr - sm * sr) / det;

    double amax = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] -= alpha + beta * m[i];
        amax = std::max(amax, std::abs(r[i]));
    }
    double scale = 1.0 / std::max(1.0, amax);

    FieldVec phi = make_field(make_space(SpaceKind::P1Scalar, mesh));
    for (int i = 0; i < n; ++i) phi.coeffs[i] = -0.05 + 0.001 * scale * r[i];
    return phi;
}

double bubble_initial_phase(Vec2 p, Vec2 center, double radius, double epsilon) {
    double d = norm(p - center);
    return std::tanh((radius - d) / (std::sqrt(2.0) * epsilon));
}

}  // namespace chmhd
