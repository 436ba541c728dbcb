#pragma once

// Trapped-ion spin-spin couplings for a linear chain: equilibrium positions
// in the harmonic + Coulomb potential, transverse phonon modes, and the
// beatnote-detuned coupling matrix J_ij, plus a power-law surrogate and an
// exponent-fitting utility.
//
// Units: axial positions in the Coulomb length scale, mode frequencies in
// units of the transverse COM frequency, J_ij in units of J_0.

#include <optional>

#include <Eigen/Dense>

#include "spinramp/exceptions.hpp"

namespace spinramp {

/// Linear chain at mechanical equilibrium. beta = omega_axial/omega_transverse.
struct IonChain {
    Eigen::VectorXd positions;  // strictly increasing, antisymmetric about 0
    double beta = 0.0;

    int n_ions() const { return static_cast<int>(positions.size()); }
};

/// Transverse normal modes: frequencies descending, omega_1 = 1 (COM),
/// eigenvector columns orthonormal with the largest component positive.
struct PhononModes {
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd eigenvectors;  // column nu = b_{:, nu}

    int n_modes() const { return static_cast<int>(frequencies.size()); }
};

struct CouplingParams {
    double mu = 1.0219;  // Raman beatnote, units of omega_COM; must be > 1
    double j0 = 1.0;     // energy scale J_0
    int j_sign = +1;     // J_plus / J_minus of the Ising Hamiltonian
};

/// Real symmetric coupling matrix with zero diagonal and spatial-reflection
/// symmetry J_ij = J_{N-1-i, N-1-j}.
class CouplingMatrix {
  public:
    explicit CouplingMatrix(Eigen::MatrixXd values);
    static CouplingMatrix zero(int n);

    int n() const { return static_cast<int>(values_.rows()); }
    double operator()(int i, int j) const { return values_(i, j); }
    const Eigen::MatrixXd& values() const { return values_; }
    double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

  private:
    Eigen::MatrixXd values_;
};

struct EquilibriumOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;  // per-ion force residual target
    std::optional<Eigen::VectorXd> initial_guess;
};

/// Equilibrium positions u_i from damped Newton iteration on the force
/// balance u_i = sum_{j<i} (u_i-u_j)^-2 - sum_{j>i} (u_i-u_j)^-2.
/// Throws ConvergenceError if the residual stays above tolerance.
Eigen::VectorXd solve_equilibrium(int n_ions, const EquilibriumOptions& opts = {});

/// Convenience: equilibrium chain with the given trap anisotropy.
IonChain make_ion_chain(int n_ions, double beta);

/// Diagonalizes the transverse stiffness matrix
///   A_ii = 1 - beta^2 sum_{k != i} |u_i - u_k|^-3,
///   A_ij = beta^2 |u_i - u_j|^-3   (i != j),
/// returning omega_nu = sqrt(eigenvalue) sorted descending. Throws
/// StabilityError on a negative eigenvalue (zigzag instability).
PhononModes transverse_modes(const IonChain& chain);

/// J_ij = j0 * sum_nu b_i,nu b_j,nu / (mu^2 - omega_nu^2), zero diagonal.
/// Throws ResonanceError if mu lies within 1e-9 of a mode frequency.
CouplingMatrix jij_matrix(const PhononModes& modes, const CouplingParams& params);

/// Least-squares exponent alpha of J_ij ~ r_ij^-alpha over all pairs.
/// Throws DomainError if any off-diagonal coupling is not positive.
double fit_power_law(const CouplingMatrix& J, const IonChain& chain);

/// Surrogate on the integer lattice: J_ij = j0 / |i-j|^alpha.
CouplingMatrix power_law_couplings(int n, double alpha, double j0);

}  // namespace spinramp
