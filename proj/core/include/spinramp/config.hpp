#pragma once

// Flat key-value experiment configuration with dotted section keys. All keys
// are optional; defaults depend on model.kind and reproduce the reference
// setup (N=10 phonon couplings, mu=1.0219, beta=0.691/4.8, exponential ramp
// with t_stop = 6 tau and a quench to zero).

#include <map>
#include <string>
#include <vector>

#include "spinramp/analysis.hpp"
#include "spinramp/models.hpp"

namespace spinramp {

struct ExperimentConfig {
    // model block
    ModelKind model_kind = ModelKind::Tfim;
    int n_sites = 10;
    std::string coupling_source = "phonon";  // phonon | power_law
    double mu = 1.0219;
    double beta = 0.691 / 4.8;
    double alpha = 1.0;          // power_law source exponent
    double j_prefactor = 0.0802; // phonon couplings in units of J_0
    double j0 = 1.0;             // power_law scale in units of J_0
    int j_sign = +1;

    // schedule block (fields in units of J_0 for the Ising chain)
    ScheduleKind schedule_kind = ScheduleKind::Exponential;
    double b0 = 5.0;
    double tau = 0.4;
    double t_stop_factor = 6.0;  // Ising chain: t_stop = factor * tau
    double b_stop_target = 20.0; // two-level ramp: t_stop = (b_stop - b0)/tau
    PostStop post_stop = PostStop::QuenchToZero;

    // integrator block
    double dt = 1e-3;
    double solver_tolerance = 1e-12;
    int record_stride = 10;
    double t_meas = 0.0;  // 0 = auto: four periods of the final coupled gap

    // observable block
    std::vector<double> thetas = {};  // filled by defaults
    AmplitudeMethod amplitude_method = AmplitudeMethod::FirstExtrema;

    // sweep block
    std::string sweep_parameter = "tau";
    std::vector<double> sweep_values = {};
    std::vector<double> sweep_tau_values = {};  // hold-sweep tau set

    // spectrum block
    std::vector<double> spectrum_fields = {};
    int spectrum_levels = 12;

    /// Every key=value pair after resolution, for provenance echoes.
    std::map<std::string, std::string> resolved() const;
};

/// Defaults for the given model kind.
ExperimentConfig default_config(ModelKind kind = ModelKind::Tfim);

/// Parse a config file (lines of `key = value`, '#' comments) over the
/// defaults, then apply `key=value` override strings. Unknown keys or
/// malformed values throw ConfigError.
ExperimentConfig load_config(const std::string& path_or_empty,
                             const std::vector<std::string>& overrides);

/// Apply a single override to an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parse a scalar that may use pi notation: "pi", "pi/6", "3*pi/4", "0.25".
double parse_angle(const std::string& text);

}  // namespace spinramp
