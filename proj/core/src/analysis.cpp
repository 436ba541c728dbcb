#include "spinramp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace spinramp {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_power_of_two_dim(Eigen::Index dim, int& n_sites) {
    if (dim < 2) return false;
    n_sites = 0;
    Eigen::Index d = dim;
    while (d > 1) {
        if (d % 2 != 0) return false;
        d /= 2;
        ++n_sites;
    }
    return true;
}

// ||[A, B]||_max via sparse products.
double commutator_max(const SpinOperator& a, const SpinOperator& b) {
    return (a * b - b * a).max_abs();
}

// Make the largest-magnitude component of each column real positive.
void canonicalize_phases(MatrixXc& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index arg = 0;
        v.col(c).cwiseAbs().maxCoeff(&arg);
        const Complex z = v(arg, c);
        if (std::abs(z) > 0) v.col(c) *= std::conj(z) / std::abs(z);
    }
}

// Diagonalize `sym` restricted to columns [i, j) of v, rotating them in
// place. Returns the eigenvalues of the restriction (ascending).
Eigen::VectorXd diagonalize_block(MatrixXc& v, Eigen::Index i, Eigen::Index j,
                                  const SpinOperator& sym) {
    MatrixXc sub = v.middleCols(i, j - i);
    MatrixXc m(j - i, j - i);
    for (Eigen::Index c = 0; c < j - i; ++c) {
        const VectorXc sc = sym.apply_raw(sub.col(c));
        for (Eigen::Index r = 0; r < j - i; ++r) m(r, c) = sub.col(r).dot(sc);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m);
    v.middleCols(i, j - i) = sub * es.eigenvectors();
    return es.eigenvalues();
}

// Rotate each near-degenerate energy cluster into simultaneous eigenstates
// of the (mutually commuting) symmetry operators: diagonalize the first
// within the cluster, then the second within each eigenvalue sub-block.
void rotate_clusters(MatrixXc& v, const Eigen::VectorXd& energies,
                     const std::vector<const SpinOperator*>& syms, double cluster_tol) {
    const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
    Eigen::Index i = 0;
    const Eigen::Index n = energies.size();
    while (i < n) {
        Eigen::Index j = i + 1;
        while (j < n && energies[j] - energies[i] < cluster_tol * scale) ++j;
        if (j - i > 1 && !syms.empty()) {
            const Eigen::VectorXd lam = diagonalize_block(v, i, j, *syms[0]);
            if (syms.size() > 1) {
                Eigen::Index a = 0;
                while (a < j - i) {
                    Eigen::Index b = a + 1;
                    while (b < j - i && lam[b] - lam[a] < 1e-6) ++b;
                    if (b - a > 1) diagonalize_block(v, i + a, i + b, *syms[1]);
                    a = b;
                }
            }
        }
        i = j;
    }
}

// Per-column symmetry label: +-1 where the expectation is sharp, 0 otherwise.
std::vector<int> read_labels(const MatrixXc& v, const SpinOperator& sym) {
    std::vector<int> labels(static_cast<size_t>(v.cols()), 0);
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const Complex val = v.col(c).dot(sym.apply_raw(v.col(c)));
        const double x = val.real();
        if (std::abs(std::abs(x) - 1.0) <= 1e-6)
            labels[static_cast<size_t>(c)] = x > 0 ? +1 : -1;
    }
    return labels;
}

double parabolic_vertex_x(double x1, double y1, double x2, double y2, double x3, double y3) {
    const double d1 = (x2 - x1) * (y2 - y3);
    const double d2 = (x2 - x3) * (y2 - y1);
    const double denom = d1 - d2;
    if (denom == 0.0) return x2;
    return x2 - 0.5 * ((x2 - x1) * d1 - (x2 - x3) * d2) / denom;
}

double parabolic_vertex_y(double y1, double y2, double y3) {
    const double curv = y1 - 2.0 * y2 + y3;
    if (curv == 0.0) return y2;
    return y2 - 0.125 * (y3 - y1) * (y3 - y1) / curv;
}

// Radix-2 in-place FFT (decimation in time), n a power of two.
void fft_radix2(std::vector<Complex>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex t = w * a[i + k + len / 2];
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
}

}  // namespace

SpectrumResult spectrum(const SpinOperator& op, const SpectrumOptions& opts) {
    const Eigen::Index dim = op.dim();
    if (dim > (Eigen::Index(1) << 14))
        throw CapabilityError("spectrum: dimension " + std::to_string(dim) +
                              " exceeds the 2^14 cap");
    op.require_hermitian(1e-10 * std::max(1.0, op.max_abs()));

    SpectrumResult out;
    if (op.is_diagonal()) {
        // Common fast path: the quenched Ising Hamiltonian is diagonal.
        Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
        for (const auto& e : op.entries()) d[e.row()] = e.value().real();
        std::vector<Eigen::Index> order(static_cast<size_t>(dim));
        std::iota(order.begin(), order.end(), Eigen::Index(0));
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
        out.energies.resize(dim);
        out.eigenvectors = MatrixXc::Zero(dim, dim);
        for (Eigen::Index m = 0; m < dim; ++m) {
            out.energies[m] = d[order[static_cast<size_t>(m)]];
            out.eigenvectors(order[static_cast<size_t>(m)], m) = 1.0;
        }
    } else {
        const MatrixXc dense = op.dense();
        if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
            // Real symmetric path (all the model Hamiltonians land here).
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.real());
            if (es.info() != Eigen::Success)
                throw ConvergenceError("spectrum: real eigensolver failed", 0.0);
            out.energies = es.eigenvalues();
            out.eigenvectors = es.eigenvectors().cast<Complex>();
        } else {
            Eigen::SelfAdjointEigenSolver<MatrixXc> es(dense);
            if (es.info() != Eigen::Success)
                throw ConvergenceError("spectrum: eigensolver failed", 0.0);
            out.energies = es.eigenvalues();
            out.eigenvectors = es.eigenvectors();
        }
    }

    int n_sites = 0;
    if (opts.compute_parities && is_power_of_two_dim(dim, n_sites)) {
        const double scale = std::max(1.0, op.max_abs());
        const SpinOperator flip = global_flip_operator(n_sites);
        const SpinOperator rev = site_reversal_operator(n_sites);
        const bool flip_ok = commutator_max(op, flip) < 1e-12 * scale;
        const bool rev_ok = commutator_max(op, rev) < 1e-12 * scale;
        std::vector<const SpinOperator*> syms;
        if (flip_ok) syms.push_back(&flip);
        if (rev_ok) syms.push_back(&rev);
        rotate_clusters(out.eigenvectors, out.energies, syms, opts.cluster_tolerance);
        out.parity_flip = flip_ok ? read_labels(out.eigenvectors, flip)
                                  : std::vector<int>(static_cast<size_t>(dim), 0);
        out.parity_spatial = rev_ok ? read_labels(out.eigenvectors, rev)
                                    : std::vector<int>(static_cast<size_t>(dim), 0);
        out.has_flip_parity = flip_ok && out.parity_flip[0] != 0;
        out.has_spatial_parity = rev_ok && out.parity_spatial[0] != 0;
    } else {
        out.parity_flip.assign(static_cast<size_t>(dim), 0);
        out.parity_spatial.assign(static_cast<size_t>(dim), 0);
    }

    canonicalize_phases(out.eigenvectors);
    return out;
}

OverlapDecomposition decompose(const StateVector& psi, const SpectrumResult& spec) {
    if (psi.dim() != spec.eigenvectors.rows())
        throw ShapeError("decompose: dimension mismatch");
    OverlapDecomposition dec;
    dec.overlaps = spec.eigenvectors.adjoint() * psi.amplitudes();
    dec.energies = spec.energies;
    const double total = dec.overlaps.squaredNorm();
    if (std::abs(total - 1.0) > 1e-8)
        throw ConsistencyError("decompose: completeness violated, sum |P_m|^2 = " +
                               std::to_string(total));
    return dec;
}

double ground_state_probability(const OverlapDecomposition& dec, double degeneracy_tol) {
    if (dec.energies.size() == 0) return 0.0;
    const double e0 = dec.energies[0];
    double p = 0.0;
    for (Eigen::Index m = 0; m < dec.energies.size(); ++m)
        if (dec.energies[m] - e0 < degeneracy_tol)
            p += std::norm(dec.overlaps[m]);
    return p;
}

AmplitudeResult extract_amplitude(const std::vector<double>& times,
                                  const std::vector<double>& values,
                                  double t_start, AmplitudeMethod method) {
    if (times.size() != values.size())
        throw ShapeError("extract_amplitude: times/values length mismatch");
    AmplitudeResult res;
    res.method = method;

    size_t first = 0;
    while (first < times.size() && times[first] < t_start) ++first;

    if (method == AmplitudeMethod::GlobalWindow) {
        if (first >= times.size()) {
            res.flat = true;
            return res;
        }
        size_t imax = first, imin = first;
        for (size_t k = first; k < values.size(); ++k) {
            if (values[k] > values[imax]) imax = k;
            if (values[k] < values[imin]) imin = k;
        }
        res.amplitude = 0.5 * (values[imax] - values[imin]);
        res.t_max = times[imax];
        res.t_min = times[imin];
        res.flat = res.amplitude == 0.0;
        return res;
    }

    // First local maximum and first local minimum after t_start.
    size_t imax = 0, imin = 0;
    bool have_max = false, have_min = false;
    for (size_t k = std::max(first, size_t(1)); k + 1 < values.size(); ++k) {
        if (!have_max && values[k] > values[k - 1] && values[k] > values[k + 1]) {
            imax = k;
            have_max = true;
        }
        if (!have_min && values[k] < values[k - 1] && values[k] < values[k + 1]) {
            imin = k;
            have_min = true;
        }
        if (have_max && have_min) break;
    }
    if (!have_max || !have_min) {
        res.flat = true;
        return res;
    }
    const double vmax = parabolic_vertex_y(values[imax - 1], values[imax], values[imax + 1]);
    const double vmin = parabolic_vertex_y(values[imin - 1], values[imin], values[imin + 1]);
    res.t_max = parabolic_vertex_x(times[imax - 1], values[imax - 1], times[imax],
                                   values[imax], times[imax + 1], values[imax + 1]);
    res.t_min = parabolic_vertex_x(times[imin - 1], values[imin - 1], times[imin],
                                   values[imin], times[imin + 1], values[imin + 1]);
    res.amplitude = 0.5 * (vmax - vmin);
    return res;
}

std::vector<double> reconstruct_series(const OverlapDecomposition& dec,
                                       const SpinOperator& observable,
                                       const SpectrumResult& spec,
                                       const std::vector<double>& times) {
    if (spec.eigenvectors.rows() != observable.dim())
        throw ShapeError("reconstruct_series: dimension mismatch");
    if (dec.overlaps.size() != spec.energies.size())
        throw ShapeError("reconstruct_series: overlap/eigenbasis mismatch");

    // Evaluate via psi(t) = sum_m P_m e^{-i E_m t} |m>, which is the same
    // double sum grouped by state; O(dim^2) per time instead of O(dim^4).
    std::vector<double> out;
    out.reserve(times.size());
    VectorXc coeff(dec.overlaps.size());
    for (const double t : times) {
        for (Eigen::Index m = 0; m < coeff.size(); ++m)
            coeff[m] = dec.overlaps[m] * std::exp(-kI * spec.energies[m] * t);
        const VectorXc psi_t = spec.eigenvectors * coeff;
        const Complex val = psi_t.dot(observable.apply_raw(psi_t));
        if (std::abs(val.imag()) > 1e-9)
            throw ConsistencyError("reconstruct_series: imaginary residue " +
                                   std::to_string(val.imag()));
        out.push_back(val.real());
    }
    return out;
}

std::vector<SpectralPeak> oscillation_spectrum(const std::vector<double>& times,
                                               const std::vector<double>& values) {
    if (times.size() != values.size())
        throw ShapeError("oscillation_spectrum: times/values length mismatch");
    const size_t n = values.size();
    if (n < 16) throw InsufficientDataError("oscillation_spectrum: need at least 16 samples");
    const double dt = times[1] - times[0];
    for (size_t k = 1; k + 1 < times.size(); ++k)
        if (std::abs((times[k + 1] - times[k]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw DomainError("oscillation_spectrum: sampling is not uniform");

    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    size_t nfft = 1;
    while (nfft < n) nfft <<= 1;
    std::vector<Complex> buf(nfft, Complex(0, 0));
    for (size_t k = 0; k < n; ++k) buf[k] = Complex(values[k] - mean, 0.0);
    fft_radix2(buf);

    const size_t half = nfft / 2;
    std::vector<double> mag(half);
    for (size_t k = 0; k < half; ++k) mag[k] = std::abs(buf[k]);

    std::vector<double> sorted(mag.begin() + 1, mag.end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double threshold = 5.0 * median;

    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * dt);
    std::vector<SpectralPeak> peaks;
    for (size_t k = 1; k + 1 < half; ++k) {
        if (mag[k] <= threshold) continue;
        if (mag[k] < mag[k - 1] || mag[k] < mag[k + 1]) continue;
        const double kref = parabolic_vertex_x(static_cast<double>(k - 1), mag[k - 1],
                                               static_cast<double>(k), mag[k],
                                               static_cast<double>(k + 1), mag[k + 1]);
        peaks.push_back({kref * dw, parabolic_vertex_y(mag[k - 1], mag[k], mag[k + 1])});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
    return peaks;
}

LzCurves lz_analytic_curves(const std::vector<double>& phi_grid, double theta, double b_hold) {
    const SpinOperator h = lz_hamiltonian(b_hold);
    const SpectrumResult spec = spectrum(h, SpectrumOptions{.compute_parities = false});
    const SpinOperator obs = rotated_magnetization(theta, 1);
    const Complex o12 = spec.eigenvectors.col(0).dot(obs.apply_raw(spec.eigenvectors.col(1)));

    LzCurves out;
    out.probability.reserve(phi_grid.size());
    out.amplitude.reserve(phi_grid.size());
    for (const double phi : phi_grid) {
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        out.probability.push_back(c * c);
        out.amplitude.push_back(std::abs(2.0 * c * s * o12));
    }
    return out;
}

GapScanResult minimal_gap_scan(const ModelSpec& model, const std::vector<double>& fields) {
    if (fields.empty()) throw DomainError("minimal_gap_scan: empty field grid");
    for (size_t k = 1; k < fields.size(); ++k)
        if (fields[k] <= fields[k - 1])
            throw DomainError("minimal_gap_scan: field grid must be ascending");

    GapScanResult res;
    res.fields = fields;
    res.coupled_gaps.reserve(fields.size());

    FieldSchedule probe;  // constant field, value substituted per scan point
    probe.kind = ScheduleKind::Constant;

    for (const double b : fields) {
        probe.b0 = b;
        const SpinOperator h = hamiltonian_at(model, probe, 0.0);
        const SpectrumResult spec = spectrum(h);
        double gap = std::numeric_limits<double>::quiet_NaN();
        if (spec.has_flip_parity && spec.has_spatial_parity) {
            const int f0 = spec.parity_flip[0];
            const int s0 = spec.parity_spatial[0];
            for (Eigen::Index m = 1; m < spec.energies.size(); ++m) {
                if (spec.parity_flip[static_cast<size_t>(m)] == f0 &&
                    spec.parity_spatial[static_cast<size_t>(m)] == s0 &&
                    spec.energies[m] - spec.energies[0] > 1e-9) {
                    gap = spec.energies[m] - spec.energies[0];
                    break;
                }
            }
        }
        if (std::isnan(gap)) {
            res.used_parity_fallback = true;
            gap = spec.energies[1] - spec.energies[0];
        }
        res.coupled_gaps.push_back(gap);
    }

    size_t kmin = 0;
    for (size_t k = 1; k < res.coupled_gaps.size(); ++k)
        if (res.coupled_gaps[k] < res.coupled_gaps[kmin]) kmin = k;

    if (kmin == 0 || kmin + 1 == fields.size()) {
        res.b_star = fields[kmin];
        res.gap_star = res.coupled_gaps[kmin];
    } else {
        res.b_star = parabolic_vertex_x(fields[kmin - 1], res.coupled_gaps[kmin - 1],
                                        fields[kmin], res.coupled_gaps[kmin],
                                        fields[kmin + 1], res.coupled_gaps[kmin + 1]);
        res.gap_star = parabolic_vertex_y(res.coupled_gaps[kmin - 1], res.coupled_gaps[kmin],
                                          res.coupled_gaps[kmin + 1]);
    }
    return res;
}

}  // namespace spinramp
