#include "chmhd/assembly.hpp"

namespace chmhd {

CompressedMatrix assemble_weighted_operator(const Space& trial, const Space& test,
                                            const Mesh& mesh, const Kernel& kernel) {
    CHMHD_REQUIRE(trial.n_nodes == mesh.n_nodes() && test.n_nodes == mesh.n_nodes(),
                  "space/mesh mismatch");
    const QuadRule rule = tri_quadrature();
    const int nt = trial.local_count(), ns = test.local_count();

    Triplets trips(test.dof_count(), trial.dof_count());
    trips.r.reserve(static_cast<size_t>(mesh.n_tris()) * nt * ns);
    trips.c.reserve(trips.r.capacity());
    trips.v.reserve(trips.r.capacity());

    ShapeRef sh_trial[8], sh_test[8];
    double local[8 * 8];

    for (int t = 0; t < mesh.n_tris(); ++t) {
        TriGeom geom = tri_geometry(mesh, t);
        for (int k = 0; k < nt * ns; ++k) local[k] = 0.0;
        for (int q = 0; q < rule.n; ++q) {
            const QuadPoint& qp = rule.pts[q];
            double w = 2.0 * geom.area * qp.w;
            KernelPoint kp{bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2), t, q};
            eval_shapes(trial, geom, qp.l0, qp.l1, qp.l2, sh_trial);
            eval_shapes(test, geom, qp.l0, qp.l1, qp.l2, sh_test);
            for (int a = 0; a < ns; ++a)
                for (int b = 0; b < nt; ++b)
                    local[a * nt + b] += w * kernel(kp, sh_trial[b], sh_test[a]);
        }
        for (int a = 0; a < ns; ++a) {
            int ga = global_dof(test, mesh, t, a);
            for (int b = 0; b < nt; ++b)
                trips.add(ga, global_dof(trial, mesh, t, b), local[a * nt + b]);
        }
    }
    return compress(trips);
}

CompressedMatrix assemble_mass(const Space& space, const Mesh& mesh) {
    return assemble_weighted_operator(space, space, mesh,
                                      [](const KernelPoint&, const ShapeRef& u, const ShapeRef& v) {
                                          return u.comp == v.comp ? u.v * v.v : 0.0;
                                      });
}

std::vector<double> assemble_load(const Space& space, const Mesh& mesh, const AnalyticFn& f) {
    const QuadRule rule = tri_quadrature();
    const int ns = space.local_count();
    std::vector<double> load(space.dof_count(), 0.0);
    ShapeRef sh[8];
    double fv[2];
    for (int t = 0; t < mesh.n_tris(); ++t) {
        TriGeom geom = tri_geometry(mesh, t);
        for (int q = 0; q < rule.n; ++q) {
            const QuadPoint& qp = rule.pts[q];
            double w = 2.0 * geom.area * qp.w;
            f(bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2), fv);
            eval_shapes(space, geom, qp.l0, qp.l1, qp.l2, sh);
            for (int a = 0; a < ns; ++a)
                load[global_dof(space, mesh, t, a)] += w * fv[sh[a].comp] * sh[a].v;
        }
    }
    return load;
}

FieldVec l2_project(const Space& space, const Mesh& mesh, const AnalyticFn& f) {
    CompressedMatrix M = assemble_mass(space, mesh);
    std::vector<double> load = assemble_load(space, mesh, f);
    FieldVec out{space, solve_direct(M, load)};
    return out;
}

double integrate(const Mesh& mesh, const std::function<double(const KernelPoint&)>& f) {
    const QuadRule rule = tri_quadrature();
    double total = 0.0;
    for (int t = 0; t < mesh.n_tris(); ++t) {
        TriGeom geom = tri_geometry(mesh, t);
        for (int q = 0; q < rule.n; ++q) {
            const QuadPoint& qp = rule.pts[q];
            KernelPoint kp{bary_to_xy(mesh, t, qp.l0, qp.l1, qp.l2), t, q};
            total += 2.0 * geom.area * qp.w * f(kp);
        }
    }
    return total;
}

}  // namespace chmhd
