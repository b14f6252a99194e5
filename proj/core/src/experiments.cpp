#include "chmhd/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "chmhd/exact.hpp"
#include "chmhd/io.hpp"
#include "chmhd/quadrature.hpp"

namespace chmhd {

PhysParams matched_density_test_params() {
    PhysParams p;
    p.rho1 = p.rho2 = 1.0;
    p.eta1 = p.eta2 = 1.0;
    p.sigma1 = p.sigma2 = 1.0;
    p.m1 = p.m2 = 1.0;
    p.mu = 1.0;
    p.gamma = 1.0;
    p.epsilon = 1.0;
    p.lambda = 1.0;
    p.gravity = {0.0, 0.0};
    return p;
}

PhysParams contrast_density_test_params() {
    PhysParams p = matched_density_test_params();
    p.rho2 = 1e-3;
    return p;
}

PhysParams spinodal_params() {
    PhysParams p;
    p.rho1 = 1.0;
    p.rho2 = 1e-3;
    p.eta1 = p.eta2 = 1.0;
    p.sigma1 = p.sigma2 = 1.0;
    p.m1 = p.m2 = 1.0;
    p.mu = 1.0;
    p.gamma = 0.01;
    p.epsilon = 0.01;
    p.lambda = 1.0;
    p.gravity = {0.0, 0.0};
    return p;
}

BubbleConfig make_bubble_config(bool strong_field) {
    BubbleConfig c;
    c.strong_field = strong_field;
    c.params = bubble_params(strong_field);
    return c;
}

PhysParams bubble_params(bool strong_field) {
    PhysParams p;
    p.rho1 = 9.0;  // bulk fluid (phi = -1); the bubble (phi = +1) is lighter
    p.rho2 = 1.0;
    p.eta1 = p.eta2 = 1.0;
    p.sigma1 = p.sigma2 = strong_field ? 1000.0 : 1.0;
    p.m1 = p.m2 = 1e-4;
    p.mu = strong_field ? 1e-3 : 1.0;
    p.gamma = 1.0;
    p.epsilon = 0.01;
    p.lambda = 5.0;
    p.gravity = {0.0, -10.0};
    return p;
}

namespace {

Mesh unit_square_mesh(int nx) {
    Mesh m = build_mesh({0.0, 1.0, 0.0, 1.0}, nx, nx);
    classify_boundary(m);
    return m;
}

// Quadrature integral of the phase source at a fixed time, used to split the
// manufactured contribution out of the mass balance. The stepper applies the
// phase source through its P1 interpolant, so the balance integrates the
// interpolant, not the raw expression.
double phase_source_integral(const Mesh& mesh, const ExactSolution& ex, double t) {
    FieldVec f = make_field(make_space(SpaceKind::P1Scalar, mesh));
    for (int n = 0; n < mesh.n_nodes(); ++n) {
        Vec2 fu, fB;
        double fom;
        ex.forcing(mesh.nodes[size_t(n)], t, &fu, &fB, &f.coeffs[size_t(n)], &fom);
    }
    return phase_mass(mesh, f);
}

}  // namespace

ConvergeResult run_converge(const ConvergeConfig& cfg) {
    CHMHD_REQUIRE(!cfg.resolutions.empty(), "need at least one resolution");
    const PhysParams params =
        cfg.contrast_density ? contrast_density_test_params() : matched_density_test_params();
    const ExactSolution ex(params);
    const char* tag = cfg.contrast_density ? "contrast" : "matched";

    std::optional<CsvFile> errors_csv;
    if (!cfg.out_dir.empty()) {
        ensure_directory(cfg.out_dir);
        errors_csv.emplace(cfg.out_dir + "/errors_" + tag + ".csv",
                           std::vector<std::string>{"nx", "h", "steps", "phi_l2", "phi_h1", "u_l2",
                                                    "u_h1", "B_l2", "B_h1", "p_l2", "div_max",
                                                    "mass_defect_max"});
    }

    ConvergeResult out;
    for (int nx : cfg.resolutions) {
        CHMHD_REQUIRE(nx >= 2, "resolution must be at least 2");
        const Mesh mesh = unit_square_mesh(nx);
        const int n_steps = int(std::lround(cfg.t_final * nx * nx));
        CHMHD_REQUIRE(n_steps >= 1, "resolution too coarse for the final time");
        SolverConfig sc = cfg.solver;
        sc.dt = cfg.t_final / n_steps;

        const BCSet bcs = BCSet::dirichlet_magnetic(
            [&ex](Vec2 p, double t) { return ex.eval(p, t).B.x; },
            [&ex](Vec2 p, double t) { return ex.eval(p, t).B.y; });
        const ForcingFn forcing = [&ex](Vec2 x, double t, Vec2* fu, Vec2* fB, double* fphi,
                                        double* fom) { ex.forcing(x, t, fu, fB, fphi, fom); };

        InitialData init;
        init.phi = [&ex](Vec2 p, double v[2]) { v[0] = ex.eval(p, 0.0).phi; };
        init.omega = [&ex](Vec2 p, double v[2]) { v[0] = ex.eval(p, 0.0).omega; };
        init.pressure = [&ex](Vec2 p, double v[2]) { v[0] = ex.eval(p, 0.0).p; };
        init.velocity = [&ex](Vec2 p, double v[2]) {
            const ExactState e = ex.eval(p, 0.0);
            v[0] = e.u.x;
            v[1] = e.u.y;
        };
        init.magnetic = [&ex](Vec2 p, double v[2]) {
            const ExactState e = ex.eval(p, 0.0);
            v[0] = e.B.x;
            v[1] = e.B.y;
        };

        TimeStepper stepper(mesh, params, sc, bcs, forcing);
        State s0 = initial_state(mesh, init);

        ConvergeRow row;
        row.nx = nx;
        row.h = mesh.h_max;
        row.steps = n_steps;
        double mass_prev = phase_mass(mesh, s0.phi);
        const State sT =
            run(stepper, std::move(s0), cfg.t_final,
                [&](int, const State&, const State& cur, int) {
                    const double m = phase_mass(mesh, cur.phi);
                    const double src = sc.dt * phase_source_integral(mesh, ex, cur.time);
                    row.mass_defect_max =
                        std::max(row.mass_defect_max, std::fabs(m - mass_prev - src));
                    mass_prev = m;
                    row.div_residual_max =
                        std::max(row.div_residual_max, divergence_residual(mesh, cur.vel));
                });

        const double T = cfg.t_final;
        row.phi = field_error(mesh, sT.phi,
                              [&](Vec2 p, double v[2]) { v[0] = ex.eval(p, T).phi; },
                              [&](Vec2 p, Vec2 g[2]) { g[0] = ex.eval(p, T).grad_phi; });
        row.vel = field_error(mesh, sT.vel,
                              [&](Vec2 p, double v[2]) {
                                  const ExactState e = ex.eval(p, T);
                                  v[0] = e.u.x;
                                  v[1] = e.u.y;
                              },
                              [&](Vec2 p, Vec2 g[2]) {
                                  const ExactState e = ex.eval(p, T);
                                  g[0] = {e.grad_u[0][0], e.grad_u[0][1]};
                                  g[1] = {e.grad_u[1][0], e.grad_u[1][1]};
                              });
        row.mag = field_error(mesh, sT.mag,
                              [&](Vec2 p, double v[2]) {
                                  const ExactState e = ex.eval(p, T);
                                  v[0] = e.B.x;
                                  v[1] = e.B.y;
                              },
                              [&](Vec2 p, Vec2 g[2]) {
                                  const ExactState e = ex.eval(p, T);
                                  g[0] = {e.grad_B[0][0], e.grad_B[0][1]};
                                  g[1] = {e.grad_B[1][0], e.grad_B[1][1]};
                              });
        row.pres_l2 = zero_mean_l2_error(mesh, sT.pres,
                                         [&](Vec2 p, double v[2]) { v[0] = ex.eval(p, T).p; });

        if (errors_csv)
            errors_csv->row({double(row.nx), row.h, double(row.steps), row.phi.l2, row.phi.h1semi,
                             row.vel.l2, row.vel.h1semi, row.mag.l2, row.mag.h1semi, row.pres_l2,
                             row.div_residual_max, row.mass_defect_max});
        std::printf("converge %s nx=%-3d  phi %.4e  u %.4e  B %.4e  p %.4e\n", tag, nx,
                    row.phi.l2, row.vel.l2, row.mag.l2, row.pres_l2);
        std::fflush(stdout);
        out.rows.push_back(row);
    }

    if (!cfg.out_dir.empty() && out.rows.size() >= 2) {
        CsvFile rates(cfg.out_dir + "/rates_" + std::string(tag) + ".csv",
                      {"nx_coarse", "nx_fine", "phi_l2", "phi_h1", "u_l2", "u_h1", "B_l2", "B_h1",
                       "p_l2"});
        for (size_t i = 1; i < out.rows.size(); ++i) {
            const ConvergeRow& a = out.rows[i - 1];
            const ConvergeRow& b = out.rows[i];
            rates.row({double(a.nx), double(b.nx), eoc(a.phi.l2, b.phi.l2, a.h, b.h),
                       eoc(a.phi.h1semi, b.phi.h1semi, a.h, b.h), eoc(a.vel.l2, b.vel.l2, a.h, b.h),
                       eoc(a.vel.h1semi, b.vel.h1semi, a.h, b.h), eoc(a.mag.l2, b.mag.l2, a.h, b.h),
                       eoc(a.mag.h1semi, b.mag.h1semi, a.h, b.h),
                       eoc(a.pres_l2, b.pres_l2, a.h, b.h)});
        }
    }
    return out;
}

SpinodalResult run_spinodal(const SpinodalConfig& cfg) {
    CHMHD_REQUIRE(cfg.steps >= 1, "need at least one step");
    const Mesh mesh = unit_square_mesh(cfg.nx);
    const PhysParams& params = cfg.params;

    InitialData init;
    init.phi_nodal = spinodal_initial_phase(mesh, cfg.seed);
    State s0 = initial_state(mesh, init);

    SolverConfig sc = cfg.solver;
    sc.dt = cfg.dt;
    TimeStepper stepper(mesh, params, sc, BCSet::homogeneous());

    SpinodalResult res;
    res.initial_energy = discrete_energy(mesh, params, s0).total;
    res.initial_mass = phase_mass(mesh, s0.phi);

    std::optional<CsvFile> energy_csv, diss_csv;
    if (!cfg.out_dir.empty()) {
        ensure_directory(cfg.out_dir);
        energy_csv.emplace(cfg.out_dir + "/energy.csv",
                           std::vector<std::string>{"step", "time", "newton_iters", "energy",
                                                    "kinetic", "magnetic", "interface", "well",
                                                    "mass"});
        diss_csv.emplace(cfg.out_dir + "/dissipation.csv",
                         std::vector<std::string>{"step", "time", "energy_change", "kinetic_jump",
                                                  "viscous", "magnetic_jump", "ohmic", "mobility",
                                                  "interface_jump", "well_jump", "well_mixed",
                                                  "well_quadratic", "defect"});
        energy_csv->row({0.0, 0.0, 0.0, res.initial_energy,
                         discrete_energy(mesh, params, s0).kinetic,
                         discrete_energy(mesh, params, s0).magnetic,
                         discrete_energy(mesh, params, s0).interface,
                         discrete_energy(mesh, params, s0).well, res.initial_mass});
    }

    const State sT = run(
        stepper, std::move(s0), cfg.dt * cfg.steps,
        [&](int step, const State& prev, const State& cur, int iters) {
            SpinodalStep rec;
            rec.step = step;
            rec.time = cur.time;
            rec.newton_iters = iters;
            rec.energy = discrete_energy(mesh, params, cur);
            rec.mass = phase_mass(mesh, cur.phi);
            rec.dissipation = step_dissipation(mesh, params, prev, cur, cfg.dt);
            if (energy_csv)
                energy_csv->row({double(step), rec.time, double(iters), rec.energy.total,
                                 rec.energy.kinetic, rec.energy.magnetic, rec.energy.interface,
                                 rec.energy.well, rec.mass});
            if (diss_csv) {
                const StepDissipation& d = rec.dissipation;
                diss_csv->row({double(step), rec.time, d.energy_change, d.kinetic_jump, d.viscous,
                               d.magnetic_jump, d.ohmic, d.mobility, d.interface_jump, d.well_jump,
                               d.well_mixed, d.well_quadratic, d.defect});
            }
            res.steps.push_back(std::move(rec));
        });

    res.coeff_ranges = stepper.coefficient_ranges();
    if (!cfg.out_dir.empty() && cfg.write_fields)
        write_vtk(cfg.out_dir + "/fields_final.vtk", mesh, sT);
    std::printf("spinodal dt=%g  E0 %.6f  E_final %.6f\n", cfg.dt, res.initial_energy,
                res.steps.back().energy.total);
    std::fflush(stdout);
    return res;
}

BubbleResult run_bubble(const BubbleConfig& cfg) {
    CHMHD_REQUIRE(cfg.nx >= 4 && cfg.nx % 2 == 0, "bubble grid must be even and at least 4");
    Mesh mesh = build_mesh({0.0, 1.0, 0.0, 1.5}, cfg.nx, 3 * cfg.nx / 2);
    classify_boundary(mesh);
    const PhysParams& params = cfg.params;

    FieldVec phi0 = make_field(make_space(SpaceKind::P1Scalar, mesh));
    for (int n = 0; n < mesh.n_nodes(); ++n)
        phi0.coeffs[size_t(n)] =
            bubble_initial_phase(mesh.nodes[size_t(n)], cfg.center, cfg.radius, params.epsilon);
    InitialData init;
    init.phi_nodal = std::move(phi0);
    init.magnetic = [](Vec2, double v[2]) {
        v[0] = 0.0;
        v[1] = 1.0;
    };
    State s0 = initial_state(mesh, init);

    SolverConfig sc = cfg.solver;
    sc.dt = cfg.dt;
    TimeStepper stepper(mesh, params, sc, BCSet::channel_with_vertical_field());

    BubbleResult res;
    res.initial_mass = phase_mass(mesh, s0.phi);

    std::optional<CsvFile> centroid_csv;
    if (!cfg.out_dir.empty()) {
        ensure_directory(cfg.out_dir);
        centroid_csv.emplace(cfg.out_dir + "/centroid.csv",
                             std::vector<std::string>{"step", "time", "newton_iters", "x", "y",
                                                      "energy", "mass"});
        write_vtk(cfg.out_dir + "/fields_000000.vtk", mesh, s0);
    }

    const State sT = run(
        stepper, std::move(s0), cfg.t_final,
        [&](int step, const State&, const State& cur, int iters) {
            BubbleStep rec;
            rec.step = step;
            rec.time = cur.time;
            rec.newton_iters = iters;
            rec.centroid = phase_centroid(mesh, cur.phi);
            rec.energy = discrete_energy(mesh, params, cur);
            rec.mass = phase_mass(mesh, cur.phi);
            if (centroid_csv)
                centroid_csv->row({double(step), rec.time, double(iters), rec.centroid.x,
                                   rec.centroid.y, rec.energy.total, rec.mass});
            if (!cfg.out_dir.empty() && cfg.vtk_every > 0 && step % cfg.vtk_every == 0) {
                char name[32];
                std::snprintf(name, sizeof(name), "/fields_%06d.vtk", step);
                write_vtk(cfg.out_dir + name, mesh, cur);
            }
            if (step % 100 == 0) {
                std::printf("bubble%s step %4d  t=%.3f  centroid y %.5f  iters %d\n",
                            cfg.strong_field ? " (strong field)" : "", step, rec.time,
                            rec.centroid.y, iters);
                std::fflush(stdout);
            }
            res.steps.push_back(rec);
        });
    (void)sT;
    return res;
}

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        size_t pos = 0;
        const int v = std::stoi(item, &pos);
        CHMHD_REQUIRE(pos == item.size(), "bad integer list entry '" + item + "'");
        out.push_back(v);
    }
    CHMHD_REQUIRE(!out.empty(), "empty integer list");
    return out;
}

PhysParams params_from_config(Config& c, PhysParams base) {
    base.rho1 = c.get_double("params.rho1", base.rho1);
    base.rho2 = c.get_double("params.rho2", base.rho2);
    base.eta1 = c.get_double("params.eta1", base.eta1);
    base.eta2 = c.get_double("params.eta2", base.eta2);
    base.sigma1 = c.get_double("params.sigma1", base.sigma1);
    base.sigma2 = c.get_double("params.sigma2", base.sigma2);
    base.m1 = c.get_double("params.m1", base.m1);
    base.m2 = c.get_double("params.m2", base.m2);
    base.mu = c.get_double("params.mu", base.mu);
    base.gamma = c.get_double("params.gamma", base.gamma);
    base.epsilon = c.get_double("params.epsilon", base.epsilon);
    base.lambda = c.get_double("params.lambda", base.lambda);
    base.gravity.x = c.get_double("params.gravity_x", base.gravity.x);
    base.gravity.y = c.get_double("params.gravity_y", base.gravity.y);
    return base;
}

void solver_from_config(Config& c, SolverConfig& sc) {
    sc.newton_tol = c.get_double("solver.newton_tol", sc.newton_tol);
    sc.newton_rtol = c.get_double("solver.newton_rtol", sc.newton_rtol);
    sc.newton_max = c.get_int("solver.newton_max", sc.newton_max);
    std::string name;
    switch (sc.jacobian_reuse) {
        case JacobianReuse::None: name = "none"; break;
        case JacobianReuse::Step: name = "step"; break;
        case JacobianReuse::Adaptive: name = "adaptive"; break;
    }
    name = c.get_string("solver.jacobian_reuse", name);
    if (name == "none")
        sc.jacobian_reuse = JacobianReuse::None;
    else if (name == "step")
        sc.jacobian_reuse = JacobianReuse::Step;
    else if (name == "adaptive")
        sc.jacobian_reuse = JacobianReuse::Adaptive;
    else
        throw Error("unknown jacobian_reuse '" + name + "' (none, step, adaptive)");
}

}  // namespace

int run_from_config(Config& cfg) {
    const std::string kind = cfg.require_string("experiment.kind");
    if (kind == "converge") {
        ConvergeConfig c;
        if (cfg.has("experiment.resolutions"))
            c.resolutions = parse_int_list(cfg.require_string("experiment.resolutions"));
        c.t_final = cfg.get_double("time.t_end", c.t_final);
        c.contrast_density = cfg.get_bool("experiment.contrast", c.contrast_density);
        c.out_dir = cfg.get_string("output.dir", "out_converge");
        solver_from_config(cfg, c.solver);
        cfg.reject_unknown();
        run_converge(c);
        const bool both = !cfg.has("experiment.contrast");
        if (both) {
            ConvergeConfig c2 = c;
            c2.contrast_density = true;
            run_converge(c2);
        }
        return 0;
    }
    if (kind == "spinodal") {
        SpinodalConfig c;
        c.nx = cfg.get_int("domain.nx", c.nx);
        c.dt = cfg.get_double("time.dt", c.dt);
        c.steps = cfg.get_int("time.steps", c.steps);
        c.seed = cfg.get_u64("experiment.seed", c.seed);
        c.params = params_from_config(cfg, c.params);
        c.write_fields = cfg.get_bool("output.write_fields", c.write_fields);
        c.out_dir = cfg.get_string("output.dir", "out_spinodal");
        solver_from_config(cfg, c.solver);
        cfg.reject_unknown();
        run_spinodal(c);
        return 0;
    }
    if (kind == "bubble") {
        BubbleConfig c = make_bubble_config(cfg.get_bool("experiment.strong_field", false));
        c.nx = cfg.get_int("domain.nx", c.nx);
        c.dt = cfg.get_double("time.dt", c.dt);
        c.t_final = cfg.get_double("time.t_end", c.t_final);
        c.params = params_from_config(cfg, c.params);
        c.center.x = cfg.get_double("experiment.center_x", c.center.x);
        c.center.y = cfg.get_double("experiment.center_y", c.center.y);
        c.radius = cfg.get_double("experiment.radius", c.radius);
        c.vtk_every = cfg.get_int("output.vtk_every", c.vtk_every);
        c.out_dir = cfg.get_string("output.dir", "out_bubble");
        solver_from_config(cfg, c.solver);
        cfg.reject_unknown();
        run_bubble(c);
        return 0;
    }
    throw Error("unknown experiment.kind '" + kind + "' (converge, spinodal, bubble)");
}

std::string default_config_text(const std::string& kind) {
    if (kind == "converge")
        return "[experiment]\nkind = converge\n";
    if (kind == "spinodal")
        return "[experiment]\nkind = spinodal\n";
    if (kind == "bubble")
        return "[experiment]\nkind = bubble\n";
    throw Error("unknown experiment '" + kind + "'");
}

}  // namespace chmhd
