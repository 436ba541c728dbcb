#pragma once

// Exact-diagonalization oracle with symmetry labels, eigenbasis overlap
// decompositions, oscillation-amplitude extraction, series reconstruction
// from the overlap sum, FFT spectroscopy and the analytic two-level curves.

#include <string>
#include <vector>

#include "spinramp/models.hpp"
#include "spinramp/spin_algebra.hpp"

namespace spinramp {

struct SpectrumOptions {
    bool compute_parities = true;
    /// Relative tolerance used to cluster near-degenerate energies before
    /// rotating each cluster into symmetry eigenstates.
    double cluster_tolerance = 1e-8;
};

/// Full spectrum, energies ascending. Eigenvector phases are canonicalized
/// (largest-magnitude component real positive). Parity labels are +-1 where
/// the corresponding symmetry commutes with the operator, 0 otherwise.
struct SpectrumResult {
    Eigen::VectorXd energies;
    MatrixXc eigenvectors;          // column m = |m>
    std::vector<int> parity_flip;   // global spin-flip label, 0 if n/a
    std::vector<int> parity_spatial;// site-reversal label, 0 if n/a
    bool has_flip_parity = false;
    bool has_spatial_parity = false;
};

/// Dense diagonalization; throws HermiticityError for non-Hermitian input
/// and CapabilityError above dimension 2^14.
SpectrumResult spectrum(const SpinOperator& op, const SpectrumOptions& opts = {});

/// Overlaps P_m = <m|psi> against an eigenbasis; completeness
/// sum_m |P_m|^2 = 1 is enforced to 1e-8.
struct OverlapDecomposition {
    VectorXc overlaps;
    Eigen::VectorXd energies;
};

OverlapDecomposition decompose(const StateVector& psi, const SpectrumResult& spec);

/// Sum of |P_m|^2 over every state within degeneracy_tol of the lowest
/// energy (degenerate-subspace projection).
double ground_state_probability(const OverlapDecomposition& dec, double degeneracy_tol = 1e-6);

enum class AmplitudeMethod { FirstExtrema, GlobalWindow };

struct AmplitudeResult {
    double amplitude = 0.0;  // (value at t_max - value at t_min) / 2
    double t_max = 0.0;
    double t_min = 0.0;
    AmplitudeMethod method = AmplitudeMethod::FirstExtrema;
    bool flat = false;       // no local extrema found
};

/// FirstExtrema: first local maximum and first local minimum after t_start
/// (three-point comparison, parabolic refinement). GlobalWindow: half the
/// max-min excursion over the whole window past t_start.
AmplitudeResult extract_amplitude(const std::vector<double>& times,
                                  const std::vector<double>& values,
                                  double t_start,
                                  AmplitudeMethod method = AmplitudeMethod::FirstExtrema);

/// Direct evaluation of the overlap sum
///   O(t) = sum_mn P_m^* P_n <m|O|n> exp(-i (E_n - E_m) t)
/// at the given times, measured from the decomposition's reference time.
/// Throws ConsistencyError if the imaginary residue exceeds 1e-9.
std::vector<double> reconstruct_series(const OverlapDecomposition& dec,
                                       const SpinOperator& observable,
                                       const SpectrumResult& spec,
                                       const std::vector<double>& times);

struct SpectralPeak {
    double angular_frequency = 0.0;  // 2*pi * FFT frequency, comparable to E_n - E_m
    double magnitude = 0.0;
};

/// Mean-subtracted FFT magnitude peaks above 5x the median, bin positions
/// refined parabolically. Requires uniform sampling and at least 16 samples.
std::vector<SpectralPeak> oscillation_spectrum(const std::vector<double>& times,
                                               const std::vector<double>& values);

/// Analytic two-level curves against the mixing angle phi:
/// probability = cos^2(phi), amplitude = |sin(2 phi) <1|O(theta)|2>| with the
/// matrix element taken between the eigenstates of the hold Hamiltonian.
struct LzCurves {
    std::vector<double> probability;
    std::vector<double> amplitude;
};

LzCurves lz_analytic_curves(const std::vector<double>& phi_grid, double theta,
                            double b_hold = 20.0);

/// Gap between the ground state and the lowest excited state sharing both
/// parity labels, scanned over field values; the minimum is refined through
/// the three bracketing points. Falls back to the raw first gap (with
/// used_parity_fallback set) when the symmetry labels are unavailable.
struct GapScanResult {
    double b_star = 0.0;
    double gap_star = 0.0;
    std::vector<double> fields;
    std::vector<double> coupled_gaps;
    bool used_parity_fallback = false;
};

GapScanResult minimal_gap_scan(const ModelSpec& model, const std::vector<double>& fields);

}  // namespace spinramp
