#pragma once

// N-site Pauli operators, tensor-product observables and global rotations
// on the 2^N dimensional spin-1/2 Hilbert space.
//
// Basis convention (fixed project-wide): site 0 is the most significant bit
// of the computational-basis index, and |up> = (1,0) is the +1 eigenstate of
// sigma^z. Basis index b therefore has site i in |up> iff bit (N-1-i) of b
// is clear.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinramp/exceptions.hpp"

namespace spinramp {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using SparseMatrixXc = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

enum class PauliAxis { X, Y, Z };

/// Normalized state on n_sites spins. The checked constructor enforces unit
/// norm to 1e-10; the integrator uses from_raw() because norm drift there is
/// a diagnostic, not an error.
class StateVector {
  public:
    StateVector(VectorXc amplitudes, int n_sites);
    static StateVector from_raw(VectorXc amplitudes, int n_sites);

    const VectorXc& amplitudes() const { return amps_; }
    VectorXc& amplitudes() { return amps_; }
    int n_sites() const { return n_sites_; }
    Eigen::Index dim() const { return amps_.size(); }
    double norm() const { return amps_.norm(); }

  private:
    StateVector() = default;
    VectorXc amps_;
    int n_sites_ = 0;
};

/// Sparse operator on the 2^N space, stored as a canonicalized coordinate
/// list (row-major sorted, duplicates summed, zeros dropped). Most operators
/// here are Hermitian; unitaries (rotations, parity permutations) share the
/// same container with hermitian_checked() == false.
class SpinOperator {
  public:
    SpinOperator() = default;
    explicit SpinOperator(SparseMatrixXc mat);
    SpinOperator(Eigen::Index dim, const std::vector<Triplet>& entries);

    static SpinOperator identity(Eigen::Index dim);
    static SpinOperator from_dense(const MatrixXc& dense);

    Eigen::Index dim() const { return mat_.rows(); }
    Eigen::Index nnz() const { return mat_.nonZeros(); }
    const SparseMatrixXc& matrix() const { return mat_; }
    MatrixXc dense() const { return MatrixXc(mat_); }

    /// Entries in canonical (row, col) order.
    std::vector<Triplet> entries() const;

    VectorXc apply_raw(const VectorXc& v) const;

    SpinOperator adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;
    bool hermitian_checked() const { return hermitian_checked_; }
    /// Throws HermiticityError unless ||M - M^dagger||_max <= tol.
    const SpinOperator& require_hermitian(double tol = 1e-12) const;

    bool is_diagonal() const;
    double max_abs() const;

    SpinOperator operator+(const SpinOperator& other) const;
    SpinOperator operator-(const SpinOperator& other) const;
    SpinOperator operator*(const SpinOperator& other) const;
    friend SpinOperator operator*(Complex scalar, const SpinOperator& op);

  private:
    void canonicalize();
    SparseMatrixXc mat_;
    mutable bool hermitian_checked_ = false;
};

struct RotationSpec {
    double theta = 0.0;  // radians, [0, pi/2] in the protocols
    int n_sites = 1;
};

/// I (x) ... (x) sigma^axis (x) ... (x) I with the Pauli at `site`.
SpinOperator pauli_site(int site, PauliAxis axis, int n_sites);

/// N-fold tensor product of per-site rotations about y:
/// prod_i [ I cos(theta/2) + i sigma^y_i sin(theta/2) ]. Unitary, real.
SpinOperator global_rotation(const RotationSpec& spec);

/// (1/N) R^dagger(theta) sum_i sigma^z_i R(theta). Hermitian, spectrum in
/// [-1, 1]. Assembled site-by-site from the literal 2x2 conjugation.
SpinOperator rotated_magnetization(double theta, int n_sites);

/// Global spin-flip operator (x)_i sigma^x_i.
SpinOperator global_flip_operator(int n_sites);

/// Site-reversal permutation |b_0 b_1 ... b_{N-1}> -> |b_{N-1} ... b_0>.
SpinOperator site_reversal_operator(int n_sites);

/// op * psi. Throws ShapeError on dimension mismatch.
VectorXc apply(const SpinOperator& op, const StateVector& psi);

/// <psi|op|psi> for Hermitian op. Imaginary residue above 1e-10 throws
/// HermiticityError.
double expectation(const SpinOperator& op, const StateVector& psi);
double expectation(const SpinOperator& op, const VectorXc& psi);

}  // namespace spinramp
