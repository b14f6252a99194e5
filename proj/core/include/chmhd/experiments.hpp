// The three canned studies and the config-driven entry point used by the
// command line tool. Each runner returns its measurements so callers (and
// the verification suite) can inspect them without re-parsing output files;
// writing CSV/VTK output is optional and controlled by out_dir.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chmhd/config.hpp"
#include "chmhd/diagnostics.hpp"
#include "chmhd/physics.hpp"
#include "chmhd/scheme.hpp"

namespace chmhd {

// Accuracy-study parameters: every coefficient 1 (matched phases), or the
// same with a 1000:1 density contrast.
PhysParams matched_density_test_params();
PhysParams contrast_density_test_params();
// Phase separation in a closed box: 1000:1 density contrast, thin interface.
PhysParams spinodal_params();
// Rising light bubble; strong_field adds a high-conductivity, low-permeability
// vertical field that brakes the rise.
PhysParams bubble_params(bool strong_field);

// Time-accuracy study against the manufactured solution. Each resolution nx
// runs to t_final with dt = t_final / round(t_final * nx^2), which keeps
// dt within rounding of h^2.
struct ConvergeConfig {
    std::vector<int> resolutions{8, 16, 32};
    double t_final = 0.1;
    bool contrast_density = false;
    SolverConfig solver;
    std::string out_dir;
    ConvergeConfig() {
        solver.newton_tol = 1e-12;
        solver.newton_rtol = 0.0;
        solver.jacobian_reuse = JacobianReuse::Step;
    }
};

struct ConvergeRow {
    int nx = 0;
    double h = 0;
    int steps = 0;
    ErrorNorms phi, vel, mag;
    double pres_l2 = 0;
    double div_residual_max = 0;  // largest weak divergence residual over all steps
    double mass_defect_max = 0;   // largest |mass change - dt * (f_phi, 1)| over all steps
};

struct ConvergeResult {
    std::vector<ConvergeRow> rows;
};
ConvergeResult run_converge(const ConvergeConfig& cfg);

// Phase separation from seeded noise around mean -0.05.
struct SpinodalConfig {
    int nx = 32;
    double dt = 0.01;
    int steps = 50;
    std::uint64_t seed = 2026;
    bool write_fields = false;
    PhysParams params = spinodal_params();
    SolverConfig solver;
    std::string out_dir;
    SpinodalConfig() {
        solver.newton_tol = 1e-13;
        solver.newton_rtol = 0.0;
        solver.jacobian_reuse = JacobianReuse::None;
    }
};

struct SpinodalStep {
    int step = 0;
    double time = 0;
    int newton_iters = 0;
    EnergyBreakdown energy;
    double mass = 0;
    StepDissipation dissipation;
};

struct SpinodalResult {
    double initial_energy = 0;
    double initial_mass = 0;
    std::vector<SpinodalStep> steps;
    CoeffRanges coeff_ranges;
};
SpinodalResult run_spinodal(const SpinodalConfig& cfg);

// Buoyant bubble in a tall box, optionally braked by a magnetic field.
// strong_field is a log label; the physics lives in params. Use
// make_bubble_config to set both coherently.
struct BubbleConfig {
    int nx = 64;  // ny = 3 nx / 2 keeps the cells square on [0,1] x [0,1.5]
    double dt = 1e-3;
    double t_final = 1.0;
    bool strong_field = false;
    Vec2 center{0.5, 0.3};
    double radius = 0.2;
    int vtk_every = 0;
    PhysParams params = bubble_params(false);
    SolverConfig solver;
    std::string out_dir;
    BubbleConfig() {
        solver.newton_tol = 1e-11;
        solver.newton_rtol = 0.0;
        solver.jacobian_reuse = JacobianReuse::Adaptive;
    }
};
BubbleConfig make_bubble_config(bool strong_field);

struct BubbleStep {
    int step = 0;
    double time = 0;
    int newton_iters = 0;
    Vec2 centroid{0, 0};
    EnergyBreakdown energy;
    double mass = 0;
};

struct BubbleResult {
    double initial_mass = 0;
    std::vector<BubbleStep> steps;
};
BubbleResult run_bubble(const BubbleConfig& cfg);

// Reads experiment.kind and dispatches; consumes [domain]/[time]/[params]/
// [solver]/[experiment]/[output] keys and rejects everything else.
int run_from_config(Config& cfg);

// Default configuration text for each canned experiment (INI).
std::string default_config_text(const std::string& kind);

}  // namespace chmhd
