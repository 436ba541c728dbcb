#pragma once

// Assembles configs into runs and sweeps: build the model in dynamical
// units, evolve through the ramp and measurement window, extract per-theta
// oscillation amplitudes and the ground-manifold probability, and persist
// everything deterministically.
//
// Unit convention: configs and CSV outputs quote couplings and fields in
// units of J_0 (ordinary frequency) and times in units of 1/J_0. The Ising
// couplings are tabulated for spin-1/2 pairs but the Hamiltonians are
// written with Pauli matrices, so one unit of J_0 advances the dynamical
// phase by 2*pi/2 = pi per unit time; the two-level ramp model is the usual
// dimensionless one and carries no conversion.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "spinramp/analysis.hpp"
#include "spinramp/config.hpp"
#include "spinramp/propagator.hpp"

namespace spinramp {

inline constexpr const char* kVersion = "0.1.0";

/// Dynamical angular-phase rate per unit of tabulated J_0 energy.
double dynamical_phase_per_j0(ModelKind kind);

/// Coupling matrix in J_0 units for the configured source.
CouplingMatrix couplings_in_j0(const ExperimentConfig& cfg);

struct BuiltExperiment {
    ModelSpec model;         // dynamical units
    FieldSchedule schedule;  // dynamical fields, literal times
    double b_stop_j0 = 0.0;  // ramp endpoint field in J_0 units
    double energy_unit = 1;  // dynamical energy per J_0
};

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

struct ThetaAmplitude {
    double theta = 0.0;
    AmplitudeResult result;
};

struct RunRecord {
    std::map<std::string, std::string> config_snapshot;
    double tau = 0.0;
    double t_stop = 0.0;
    double b_stop = 0.0;  // J_0 units
    double t_meas = 0.0;
    std::vector<double> times;
    std::map<std::string, std::vector<double>> series;  // energy, norm, theta_*
    std::vector<ThetaAmplitude> amplitudes;
    double p_ground = 0.0;
    std::vector<double> low_energies;  // lowest 8, J_0 units
    std::vector<int> low_parity_flip;
    std::vector<int> low_parity_spatial;
    double closure_residual = 0.0;
    double max_norm_drift = 0.0;
    std::string version = kVersion;
    std::string timestamp;
};

/// Initialize -> ramp -> post-stop window -> measure -> amplitudes. The
/// overlap-sum reconstruction is cross-checked against the measured series
/// before the record is returned; disagreement beyond 1e-3 throws
/// ConsistencyError so corrupt physics never persists.
RunRecord run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    double primary = 0.0;    // tau (sweep-tau) or b_stop (sweep-stop)
    double secondary = 0.0;  // theta (sweep-tau) or tau (sweep-stop)
    double amplitude = 0.0;
    double p_ground = 0.0;
    double t_stop = 0.0;
    double b_stop = 0.0;
    std::string error;  // empty on success
};

/// One run per tau grid point (parallelizable), rows ordered by (tau, theta)
/// independent of execution order. Per-run failures land in the error
/// column; the sweep continues.
std::vector<SweepRow> sweep_tau(const ExperimentConfig& cfg, int jobs = 1);
std::string sweep_tau_csv(const std::vector<SweepRow>& rows);

/// Hold-protocol sweep: t_stop = tau ln(b0 / b_target) per target field.
/// Throws DomainError if a target is outside (0, b0).
std::vector<SweepRow> sweep_stop(const ExperimentConfig& cfg, int jobs = 1);
std::string sweep_stop_csv(const std::vector<SweepRow>& rows);

struct SpectrumTable {
    // one row per (field, level): energies in J_0 units
    std::vector<std::array<double, 5>> rows;  // field, level, energy, flip, spatial
    GapScanResult gap;                        // J_0 units
};

SpectrumTable spectrum_table(const ExperimentConfig& cfg);

/// Gap scan over config.spectrum_fields, reported in J_0 units.
GapScanResult gap_scan_j0(const ExperimentConfig& cfg);

struct CouplingsReport {
    IonChain chain;          // phonon source only
    PhononModes modes;       // phonon source only
    CouplingMatrix couplings = CouplingMatrix::zero(1);  // J_0 units
    double alpha_fit = 0.0;
    bool has_chain = false;
};

CouplingsReport couplings_report(const ExperimentConfig& cfg);

// Filesystem commands behind the CLI. Each writes CSVs (and a JSON record
// for `run`) plus the resolved config echo into `out_dir`.
void cmd_run(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_sweep_tau(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);
void cmd_sweep_stop(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);
void cmd_spectrum(const ExperimentConfig& cfg, const std::string& out_dir);
void cmd_couplings(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace spinramp
