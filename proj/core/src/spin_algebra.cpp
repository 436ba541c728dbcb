#include "spinramp/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinramp {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Index pow2(int n) { return Eigen::Index(1) << n; }

// Drop entries that are exactly zero or negligible against the largest one.
void prune_small(SparseMatrixXc& m) {
    double max_abs = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(m, k); it; ++it)
            max_abs = std::max(max_abs, std::abs(it.value()));
    const double cut = max_abs * 1e-14;
    m.prune([cut](Eigen::Index, Eigen::Index, const Complex& v) {
        return std::abs(v) > cut;
    });
}

}  // namespace

StateVector::StateVector(VectorXc amplitudes, int n_sites) {
    if (n_sites < 1) throw ShapeError("StateVector: n_sites must be positive");
    if (amplitudes.size() != pow2(n_sites))
        throw ShapeError("StateVector: dimension " + std::to_string(amplitudes.size()) +
                         " is not 2^" + std::to_string(n_sites));
    const double n = amplitudes.norm();
    if (std::abs(n - 1.0) > 1e-10)
        throw ShapeError("StateVector: norm " + std::to_string(n) + " deviates from 1 beyond 1e-10");
    amps_ = std::move(amplitudes);
    n_sites_ = n_sites;
}

StateVector StateVector::from_raw(VectorXc amplitudes, int n_sites) {
    if (n_sites < 1 || amplitudes.size() != pow2(n_sites))
        throw ShapeError("StateVector::from_raw: dimension is not 2^n_sites");
    StateVector s;
    s.amps_ = std::move(amplitudes);
    s.n_sites_ = n_sites;
    return s;
}

SpinOperator::SpinOperator(SparseMatrixXc mat) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols())
        throw ShapeError("SpinOperator: matrix must be square");
    canonicalize();
}

SpinOperator::SpinOperator(Eigen::Index dim, const std::vector<Triplet>& entries) {
    mat_.resize(dim, dim);
    mat_.setFromTriplets(entries.begin(), entries.end());
    canonicalize();
}

void SpinOperator::canonicalize() {
    mat_.makeCompressed();
    prune_small(mat_);
    mat_.makeCompressed();
    hermitian_checked_ = false;
}

SpinOperator SpinOperator::identity(Eigen::Index dim) {
    SparseMatrixXc m(dim, dim);
    m.setIdentity();
    return SpinOperator(std::move(m));
}

SpinOperator SpinOperator::from_dense(const MatrixXc& dense) {
    return SpinOperator(dense.sparseView(1.0, 1e-14));
}

std::vector<Triplet> SpinOperator::entries() const {
    std::vector<Triplet> out;
    out.reserve(static_cast<size_t>(mat_.nonZeros()));
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(mat_, k); it; ++it)
            out.emplace_back(it.row(), it.col(), it.value());
    return out;
}

VectorXc SpinOperator::apply_raw(const VectorXc& v) const {
    if (v.size() != mat_.cols())
        throw ShapeError("SpinOperator::apply_raw: dimension mismatch");
    return mat_ * v;
}

SpinOperator SpinOperator::adjoint() const {
    return SpinOperator(SparseMatrixXc(mat_.adjoint()));
}

bool SpinOperator::is_hermitian(double tol) const {
    SparseMatrixXc diff = mat_ - SparseMatrixXc(mat_.adjoint());
    double max_abs = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(diff, k); it; ++it)
            max_abs = std::max(max_abs, std::abs(it.value()));
    if (max_abs <= tol) hermitian_checked_ = true;
    return max_abs <= tol;
}

const SpinOperator& SpinOperator::require_hermitian(double tol) const {
    if (!hermitian_checked_ && !is_hermitian(tol))
        throw HermiticityError("operator is not Hermitian within tolerance");
    return *this;
}

bool SpinOperator::is_diagonal() const {
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(mat_, k); it; ++it)
            if (it.row() != it.col()) return false;
    return true;
}

double SpinOperator::max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseMatrixXc::InnerIterator it(mat_, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

SpinOperator SpinOperator::operator+(const SpinOperator& other) const {
    if (dim() != other.dim()) throw ShapeError("SpinOperator +: dimension mismatch");
    return SpinOperator(SparseMatrixXc(mat_ + other.mat_));
}

SpinOperator SpinOperator::operator-(const SpinOperator& other) const {
    if (dim() != other.dim()) throw ShapeError("SpinOperator -: dimension mismatch");
    return SpinOperator(SparseMatrixXc(mat_ - other.mat_));
}

SpinOperator SpinOperator::operator*(const SpinOperator& other) const {
    if (dim() != other.dim()) throw ShapeError("SpinOperator *: dimension mismatch");
    return SpinOperator(SparseMatrixXc(mat_ * other.mat_));
}

SpinOperator operator*(Complex scalar, const SpinOperator& op) {
    return SpinOperator(SparseMatrixXc(scalar * op.mat_));
}

SpinOperator pauli_site(int site, PauliAxis axis, int n_sites) {
    if (site < 0 || site >= n_sites)
        throw std::out_of_range("pauli_site: site " + std::to_string(site) +
                                " out of range for N=" + std::to_string(n_sites));
    const Eigen::Index dim = pow2(n_sites);
    const Eigen::Index bit = Eigen::Index(1) << (n_sites - 1 - site);
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dim));
    for (Eigen::Index b = 0; b < dim; ++b) {
        const bool down = (b & bit) != 0;  // |up> is the cleared bit
        switch (axis) {
            case PauliAxis::X:
                t.emplace_back(b ^ bit, b, Complex(1.0, 0.0));
                break;
            case PauliAxis::Y:
                // sigma^y |up> = i|down>, sigma^y |down> = -i|up>
                t.emplace_back(b ^ bit, b, down ? -kI : kI);
                break;
            case PauliAxis::Z:
                t.emplace_back(b, b, Complex(down ? -1.0 : 1.0, 0.0));
                break;
        }
    }
    return SpinOperator(dim, t);
}

SpinOperator global_rotation(const RotationSpec& spec) {
    const double c = std::cos(spec.theta / 2.0);
    const double s = std::sin(spec.theta / 2.0);
    // Single-site factor I cos(theta/2) + i sigma^y sin(theta/2): a real
    // 2x2 rotation [[c, s], [-s, c]] in the |up>,|down> basis.
    Eigen::Matrix2cd r;
    r << c, s, -s, c;
    MatrixXc full = MatrixXc::Identity(1, 1);
    for (int i = 0; i < spec.n_sites; ++i) {
        MatrixXc next(full.rows() * 2, full.cols() * 2);
        next.topLeftCorner(full.rows(), full.cols()) = r(0, 0) * full;
        next.topRightCorner(full.rows(), full.cols()) = r(0, 1) * full;
        next.bottomLeftCorner(full.rows(), full.cols()) = r(1, 0) * full;
        next.bottomRightCorner(full.rows(), full.cols()) = r(1, 1) * full;
        full.swap(next);
    }
    return SpinOperator::from_dense(full);
}

SpinOperator rotated_magnetization(double theta, int n_sites) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Eigen::Matrix2cd r, sz;
    r << c, s, -s, c;
    sz << 1.0, 0.0, 0.0, -1.0;
    const Eigen::Matrix2cd m = r.adjoint() * sz * r;  // single-site r^dag sigma^z r

    const Eigen::Index dim = pow2(n_sites);
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dim) * (n_sites + 1));
    const Complex w(1.0 / n_sites, 0.0);
    for (int i = 0; i < n_sites; ++i) {
        const Eigen::Index bit = Eigen::Index(1) << (n_sites - 1 - i);
        for (Eigen::Index b = 0; b < dim; ++b) {
            const int row2 = (b & bit) ? 1 : 0;
            t.emplace_back(b, b, w * m(row2, row2));
            t.emplace_back(b ^ bit, b, w * m(1 - row2, row2));
        }
    }
    return SpinOperator(dim, t);
}

SpinOperator global_flip_operator(int n_sites) {
    const Eigen::Index dim = pow2(n_sites);
    const Eigen::Index mask = dim - 1;
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dim));
    for (Eigen::Index b = 0; b < dim; ++b)
        t.emplace_back(b ^ mask, b, Complex(1.0, 0.0));
    return SpinOperator(dim, t);
}

SpinOperator site_reversal_operator(int n_sites) {
    const Eigen::Index dim = pow2(n_sites);
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dim));
    for (Eigen::Index b = 0; b < dim; ++b) {
        Eigen::Index rev = 0;
        for (int i = 0; i < n_sites; ++i)
            if (b & (Eigen::Index(1) << i)) rev |= Eigen::Index(1) << (n_sites - 1 - i);
        t.emplace_back(rev, b, Complex(1.0, 0.0));
    }
    return SpinOperator(dim, t);
}

VectorXc apply(const SpinOperator& op, const StateVector& psi) {
    if (op.dim() != psi.dim())
        throw ShapeError("apply: operator dim " + std::to_string(op.dim()) +
                         " vs state dim " + std::to_string(psi.dim()));
    return op.apply_raw(psi.amplitudes());
}

double expectation(const SpinOperator& op, const VectorXc& psi) {
    if (op.dim() != psi.size())
        throw ShapeError("expectation: dimension mismatch");
    const Complex val = psi.dot(op.apply_raw(psi));
    if (std::abs(val.imag()) > 1e-10)
        throw HermiticityError("expectation: imaginary residue " +
                               std::to_string(val.imag()) + " exceeds 1e-10");
    return val.real();
}

double expectation(const SpinOperator& op, const StateVector& psi) {
    return expectation(op, psi.amplitudes());
}

}  // namespace spinramp
