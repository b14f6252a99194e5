// The coupled semi-implicit time stepper. Each step solves, by Newton
// iteration, one monolithic system for (u, p, B, phi, omega) at the new time
// level with coefficients frozen at the previous level:
//
//   momentum   (1/dt)(rho^ u - rho^k u^k, v) - (rho^k u (x) u, grad v)
//              + ((rho2-rho1)/2)(u (x) M_k grad omega, grad v)
//              + 2(eta_k D(u), D(v)) - (div v, p)
//              + (1/mu)(curl B, v x B^k) + lambda (phi^k grad omega, v)
//              = (rho_k^ g, v) + (f_u, v)
//   continuity (div u, q) + lam_p (1, q) = 0,   (p, 1) = 0
//   induction  (1/dt)(B - B^k, C) + (1/(mu sigma_k))(curl B, curl C)
//              + (1/(mu sigma_k))(div B, div C) - (u x B^k, curl C) = (f_B, C)
//   phase      (1/dt)(phi - phi^k, psi) - (phi^k u, grad psi)
//              + (M_k grad omega, grad psi) = (f_phi, psi)
//   potential  (omega, chi) = gamma eps (grad phi, grad chi)
//              + (gamma/eps)(phi^3 - phi^k, chi) + (f_omega, chi)
//
// Coefficient laws are evaluated on the cut-off phase value (rho^ at both
// levels, eta/sigma/M at level k); the transport factors phi^k and the
// explicit convex-splitting term use the raw previous field. The zero-mean
// pressure constraint is a bordered Lagrange-multiplier row/column.
//
// Load convention: the vector sources f_u, f_B are integrated at quadrature
// points; the scalar sources f_phi, f_omega enter through their P1 nodal
// interpolants (their strong forms carry fourth derivatives of the phase
// field, and the interpolant both dampens that roughness and makes the mass
// balance of the phase row exactly computable from nodal samples).
//
// The matrix is the exact Jacobian of this residual, so the finite
// difference directional test applies verbatim. Dirichlet rows are replaced
// by x_i - g_i (affine, hence still exactly differentiable).
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>

#include "chmhd/assembly.hpp"
#include "chmhd/mesh.hpp"
#include "chmhd/physics.hpp"
#include "chmhd/sparse.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

struct State {
    FieldVec phi, omega, vel, pres, mag;
    double time = 0.0;
};

State make_state(const Mesh& mesh);

enum class JacobianReuse { None, Step, Adaptive };

struct SolverConfig {
    double dt = 1e-2;
    double newton_tol = 1e-10;   // absolute, on the residual inf-norm
    double newton_rtol = 1e-8;   // relative, on the increment inf-norm
    int newton_max = 20;
    JacobianReuse jacobian_reuse = JacobianReuse::None;

    void validate() const;
};

// Dirichlet prescription for one (side, component): value as a function of
// position and time. Unset entries are unconstrained (natural).
using BoundaryValueFn = std::function<double(Vec2, double)>;

struct BCSet {
    std::array<std::array<std::optional<BoundaryValueFn>, 2>, 4> velocity;
    std::array<std::array<std::optional<BoundaryValueFn>, 2>, 4> magnetic;

    // u = 0 and B = 0 on every side.
    static BCSet homogeneous();
    // u = 0 everywhere; B = B_fn (both components) everywhere.
    static BCSet dirichlet_magnetic(BoundaryValueFn bx, BoundaryValueFn by);
    // no-slip top/bottom, free-slip (u1 = 0) left/right, and the tangential
    // trace of a vertical unit field: B1 = 0 top/bottom, B2 = 1 left/right.
    static BCSet channel_with_vertical_field();
};

// Manufactured sources at a fixed evaluation time: fills the momentum,
// induction, phase, and potential loads at a point.
using ForcingFn = std::function<void(Vec2 x, double t, Vec2* f_u, Vec2* f_B, double* f_phi,
                                     double* f_omega)>;

// Global unknown ordering of the packed Newton vector:
// [u nodal+bubble] [p] [lam_p] [B] [phi] [omega].
struct SystemLayout {
    int nv = 0, nt = 0;
    int off_u = 0, off_p = 0, off_lam = 0, off_B = 0, off_phi = 0, off_omega = 0;
    int n_total = 0;

    static SystemLayout make(const Mesh& mesh);
    int u_node(int node, int comp) const { return off_u + 2 * node + comp; }
    int u_bubble(int tri, int comp) const { return off_u + 2 * nv + 2 * tri + comp; }
    int p_node(int node) const { return off_p + node; }
    int B_node(int node, int comp) const { return off_B + 2 * node + comp; }
    int phi_node(int node) const { return off_phi + node; }
    int omega_node(int node) const { return off_omega + node; }
};

// A State carries no zero-mean multiplier, so pack_state writes 0 into that
// entry and unpack_state drops it. Code that must see a nonzero multiplier
// (e.g. derivative probes of the residual) has to work on packed vectors.
std::vector<double> pack_state(const SystemLayout& lay, const State& s);
State unpack_state(const SystemLayout& lay, const Mesh& mesh, const std::vector<double>& x,
                   double time);

// Observed extremes of the coefficient laws over all quadrature points, for
// the bounds audit.
struct CoeffRanges {
    double lo[4], hi[4];  // indexed by CoeffKind
    void reset();
    void merge(const CoeffRanges& other);
};

// Assembles the Newton residual (and optionally the Jacobian) of the scheme
// at `iterate`, with coefficients frozen from `state_k`, boundary rows
// replaced, and the zero-mean multiplier bordered in. Reuses one sparsity
// pattern across calls.
class SystemAssembler {
  public:
    SystemAssembler(const Mesh& mesh, PhysParams params, BCSet bcs, ForcingFn forcing = nullptr);
    ~SystemAssembler();
    SystemAssembler(SystemAssembler&&) noexcept;

    const SystemLayout& layout() const;

    // Freeze the previous-level state and the new time level for subsequent
    // assemblies (t_new is where boundary values and forcing are evaluated).
    void set_step(const State& state_k, double dt, double t_new);

    // Residual at the packed iterate x; with `matrix` true also rebuilds the
    // Jacobian values. Throws if a nonfinite value is produced, naming the
    // row block and element.
    void assemble(const std::vector<double>& x, bool matrix);

    const std::vector<double>& residual() const;
    const CompressedMatrix& jacobian() const;  // values from the last matrix assembly
    const CoeffRanges& coefficient_ranges() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot variant of the above for tests and tooling. The iterate arrives
// as a State, so its multiplier entry is zero (see pack_state).
struct NewtonSystem {
    CompressedMatrix jacobian;
    std::vector<double> residual;
};
NewtonSystem assemble_newton_system(const Mesh& mesh, const PhysParams& params,
                                    const SolverConfig& cfg, const BCSet& bcs,
                                    const State& state_k, const State& iterate,
                                    const ForcingFn& forcing = nullptr);

// Time stepper owning the assembler and the (possibly reused) factorization.
class TimeStepper {
  public:
    TimeStepper(const Mesh& mesh, PhysParams params, SolverConfig cfg, BCSet bcs,
                ForcingFn forcing = nullptr);

    // Advance one step of cfg.dt; returns the new state and the number of
    // Newton iterations (= linear solves). Throws NewtonError with the
    // residual history on non-convergence.
    std::pair<State, int> step(const State& state_k);

    const Mesh& mesh() const { return *mesh_; }
    const SolverConfig& config() const { return cfg_; }
    const SystemLayout& layout() const;
    const CoeffRanges& coefficient_ranges() const;
    double last_linear_residual() const;

  private:
    const Mesh* mesh_;
    PhysParams params_;
    SolverConfig cfg_;
    SystemAssembler assembler_;
    DirectSolver solver_;
    bool want_fresh_ = true;     // adaptive-policy carry-over flag
    int steps_since_refresh_ = 0;  // adaptive-policy refactorization age
};

// Initial data: each field is the L2 projection of the given closure into
// its space (null closures give zero fields); a directly prescribed nodal
// phase field (spinodal noise) is used as-is. Pressure is shifted to zero
// mean after projection.
struct InitialData {
    std::optional<FieldVec> phi_nodal;
    AnalyticFn phi;
    AnalyticFn velocity;
    AnalyticFn magnetic;
    AnalyticFn pressure;
    AnalyticFn omega;
};
State initial_state(const Mesh& mesh, const InitialData& init);

// Run n_steps steps from `initial`; T_end = n_steps * dt must hold to
// 1e-12 relative (the caller chooses dt = T/N). The observer sees every
// accepted step. Returns the final state.
using StepObserver = std::function<void(int step, const State& previous, const State& current,
                                        int newton_iters)>;
State run(TimeStepper& stepper, State initial, double t_end, const StepObserver& observe);

}  // namespace chmhd
