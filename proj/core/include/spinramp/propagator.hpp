#pragma once

// Crank-Nicolson time evolution under a scheduled Hamiltonian, with a
// pluggable linear-solver contract and an exact piecewise-frozen reference
// propagator for validation.

#include <map>
#include <string>
#include <vector>

#include "spinramp/models.hpp"
#include "spinramp/spin_algebra.hpp"

namespace spinramp {

struct IntegratorConfig {
    double dt = 1e-3;
    double solver_tolerance = 1e-12;  // relative residual bound for the implicit solve
    int record_stride = 1;            // record every k-th step
    bool retain_states = false;       // keep the full state history in the trajectory
};

/// Recorded evolution. Times are uniform within each schedule segment (the
/// step is shrunk so the grid lands exactly on t_stop). `norms` tracks
/// ||psi|| at the recorded times; drift away from 1 is a diagnostic, states
/// are never renormalized.
struct Trajectory {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> observables;
    std::vector<double> norms;
    std::vector<VectorXc> states;  // only when retain_states
    VectorXc state_at_stop;        // psi(t_stop), always kept
    VectorXc final_state;
    double t_stop = 0.0;
    double max_norm_drift = 0.0;
};

/// One Crank-Nicolson update: solves
///   (I + i dt/2 h_next) psi' = (I - i dt/2 h_now) psi
/// to the given relative residual. The result is not renormalized. Dense LU
/// for small dimensions, a diagonal solve when h_next is diagonal, and
/// BiCGSTAB otherwise; any method meeting the residual bound conforms.
/// Throws SolverError when the residual cannot be met.
VectorXc cn_step(const SpinOperator& h_now, const SpinOperator& h_next,
                 const VectorXc& psi, double dt, double tol);

/// Evolve from initial_state(model, schedule) to t_end, recording each named
/// observable's expectation plus "energy" (under the instantaneous model
/// Hamiltonian). No step straddles t_stop; past it the constant post-stop
/// Hamiltonian is built once. Internally the stepper subtracts the running
/// mean energy <psi|H|psi> from both Hamiltonians of a step and reinstates
/// the phase exp(-i c dt) analytically; this keeps the Cayley error centered
/// on the populated energy window without changing the reported states.
/// Throws on solver failure or cumulative norm drift above 1e-4.
Trajectory evolve(const ModelSpec& model, const FieldSchedule& schedule,
                  const IntegratorConfig& config, double t_end,
                  const std::vector<std::pair<std::string, SpinOperator>>& observables = {});

/// Reference propagator: exact matrix exponential of the Hamiltonian frozen
/// at each step midpoint, on the same two-segment grid (eigendecompose,
/// phase-advance, reassemble). Exactly norm-preserving. Dimension capped at
/// 2^8; throws CapabilityError above it.
Trajectory exact_reference(const ModelSpec& model, const FieldSchedule& schedule,
                           double grid_dt, double t_end,
                           const std::vector<std::pair<std::string, SpinOperator>>& observables = {});

}  // namespace spinramp
