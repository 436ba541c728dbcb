#pragma once

// The two driven models (two-level avoided crossing, long-range transverse
// field Ising chain) and the field schedules that drive them.

#include <optional>

#include "spinramp/ion_couplings.hpp"
#include "spinramp/spin_algebra.hpp"

namespace spinramp {

enum class ScheduleKind { Linear, Exponential, Constant };
enum class PostStop { Hold, QuenchToZero };

/// Piecewise field schedule:
///   linear:      field(t) = tau*t + b0           for t <= t_stop
///   exponential: field(t) = b0 * exp(-t/tau)     for t <= t_stop
///   constant:    field(t) = b0
/// Past t_stop the field is frozen at field(t_stop) (Hold) or 0
/// (QuenchToZero). field_at() is continuous on the closed ramp interval;
/// the quench discontinuity lives strictly after t_stop, and the
/// propagator uses the post-stop Hamiltonian for all steps starting there.
struct FieldSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double b0 = 0.0;
    double tau = 1.0;
    double t_stop = 0.0;
    PostStop post_stop = PostStop::Hold;
};

enum class ModelKind { LandauZener, Tfim };

/// LandauZener forces a single spin (2-dimensional space); Tfim carries the
/// coupling matrix.
struct ModelSpec {
    ModelKind kind = ModelKind::LandauZener;
    int n_sites = 1;
    std::optional<CouplingMatrix> couplings;  // Tfim only
    int j_sign = +1;

    static ModelSpec landau_zener();
    static ModelSpec tfim(CouplingMatrix couplings, int j_sign = +1);
};

/// bz*sigma^z + sigma^x, i.e. [[bz, 1], [1, -bz]].
SpinOperator lz_hamiltonian(double bz);

/// -j_sign * sum_{i<j} J_ij sigma^z_i sigma^z_j  -  bx * sum_i sigma^x_i.
SpinOperator tfim_hamiltonian(const CouplingMatrix& J, int j_sign, double bx);

/// Field value at time t >= 0 per the schedule rules above.
double field_at(const FieldSchedule& schedule, double t);

/// Model Hamiltonian with the scheduled field at time t.
SpinOperator hamiltonian_at(const ModelSpec& model, const FieldSchedule& schedule, double t);

/// Ground state of hamiltonian_at(model, schedule, 0), global phase fixed by
/// making the largest-magnitude amplitude real positive. Throws
/// DegeneracyError if the t=0 ground state is (near-)degenerate.
StateVector initial_state(const ModelSpec& model, const FieldSchedule& schedule);

}  // namespace spinramp
