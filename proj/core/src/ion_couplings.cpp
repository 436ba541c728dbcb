#include "spinramp/ion_couplings.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinramp {

namespace {

// Force residual of the dimensionless chain potential
// V = sum u_i^2/2 + sum_{i<j} 1/|u_i - u_j|.
Eigen::VectorXd force_residual(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::VectorXd g = u;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = u[i] - u[j];
            g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    return g;
}

Eigen::MatrixXd force_jacobian(const Eigen::VectorXd& u) {
    const int n = static_cast<int>(u.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = std::abs(u[i] - u[j]);
            const double c = 2.0 / (d * d * d);
            h(i, i) += c;
            h(i, j) -= c;
        }
    return h;
}

}  // namespace

CouplingMatrix::CouplingMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    const int n = static_cast<int>(values_.rows());
    if (values_.cols() != n) throw ShapeError("CouplingMatrix: must be square");
    for (int i = 0; i < n; ++i) {
        if (values_(i, i) != 0.0)
            throw DomainError("CouplingMatrix: diagonal must be zero");
        for (int j = 0; j < i; ++j) {
            if (values_(i, j) != values_(j, i))
                throw DomainError("CouplingMatrix: must be symmetric");
            if (std::abs(values_(i, j) - values_(n - 1 - i, n - 1 - j)) >
                1e-9 * std::max(1.0, values_.cwiseAbs().maxCoeff()))
                throw DomainError("CouplingMatrix: spatial-reflection symmetry violated");
        }
    }
}

CouplingMatrix CouplingMatrix::zero(int n) {
    return CouplingMatrix(Eigen::MatrixXd::Zero(n, n));
}

Eigen::VectorXd solve_equilibrium(int n_ions, const EquilibriumOptions& opts) {
    if (n_ions < 1) throw DomainError("solve_equilibrium: need at least one ion");
    if (n_ions == 1) return Eigen::VectorXd::Zero(1);

    Eigen::VectorXd u;
    if (opts.initial_guess) {
        u = *opts.initial_guess;
        if (u.size() != n_ions)
            throw ShapeError("solve_equilibrium: initial guess has wrong length");
    } else {
        // Uniformly spaced guess; spacing shrinks mildly with N.
        const double spacing = 2.0 * std::pow(n_ions, -0.33);
        u.resize(n_ions);
        for (int i = 0; i < n_ions; ++i)
            u[i] = spacing * (i - 0.5 * (n_ions - 1));
    }

    double res = force_residual(u).cwiseAbs().maxCoeff();
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (res < opts.tolerance) break;
        const Eigen::VectorXd g = force_residual(u);
        const Eigen::VectorXd step = force_jacobian(u).ldlt().solve(g);
        // Backtracking: reject steps that reorder ions or grow the residual.
        double lambda = 1.0;
        for (int bt = 0; bt < 40; ++bt, lambda *= 0.5) {
            Eigen::VectorXd trial = u - lambda * step;
            bool ordered = true;
            for (int i = 0; i + 1 < n_ions; ++i)
                if (trial[i] >= trial[i + 1]) { ordered = false; break; }
            if (!ordered) continue;
            const double trial_res = force_residual(trial).cwiseAbs().maxCoeff();
            if (trial_res < res) {
                u = std::move(trial);
                res = trial_res;
                break;
            }
        }
    }
    if (res >= opts.tolerance)
        throw ConvergenceError("solve_equilibrium: residual " + std::to_string(res) +
                               " after " + std::to_string(opts.max_iterations) + " iterations",
                               res);
    // The trap is reflection symmetric; make the exact antisymmetry explicit.
    Eigen::VectorXd sym(n_ions);
    for (int i = 0; i < n_ions; ++i) sym[i] = 0.5 * (u[i] - u[n_ions - 1 - i]);
    return sym;
}

IonChain make_ion_chain(int n_ions, double beta) {
    return IonChain{solve_equilibrium(n_ions), beta};
}

PhononModes transverse_modes(const IonChain& chain) {
    const int n = chain.n_ions();
    const Eigen::VectorXd& u = chain.positions;
    const double b2 = chain.beta * chain.beta;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            const double d = std::abs(u[i] - u[k]);
            const double inv3 = 1.0 / (d * d * d);
            a(i, k) = b2 * inv3;
            diag -= b2 * inv3;
        }
        a(i, i) = diag;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd lam = es.eigenvalues();  // ascending
    if (lam.minCoeff() <= 0.0)
        throw StabilityError("transverse_modes: zigzag instability at beta=" +
                             std::to_string(chain.beta) + ", N=" + std::to_string(n));

    PhononModes modes;
    modes.frequencies.resize(n);
    modes.eigenvectors.resize(n, n);
    for (int nu = 0; nu < n; ++nu) {
        const int src = n - 1 - nu;  // descending frequency order
        modes.frequencies[nu] = std::sqrt(lam[src]);
        Eigen::VectorXd v = es.eigenvectors().col(src);
        // Deterministic sign: largest-magnitude component positive.
        int arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0) v = -v;
        modes.eigenvectors.col(nu) = v;
    }
    return modes;
}

CouplingMatrix jij_matrix(const PhononModes& modes, const CouplingParams& params) {
    const int n = modes.n_modes();
    for (int nu = 0; nu < n; ++nu)
        if (std::abs(params.mu - modes.frequencies[nu]) < 1e-9)
            throw ResonanceError("jij_matrix: beatnote mu=" + std::to_string(params.mu) +
                                 " resonant with mode " + std::to_string(nu));

    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    const double mu2 = params.mu * params.mu;
    for (int nu = 0; nu < n; ++nu) {
        const double denom = mu2 - modes.frequencies[nu] * modes.frequencies[nu];
        const Eigen::VectorXd& b = modes.eigenvectors.col(nu);
        j += (params.j0 / denom) * (b * b.transpose());
    }
    j.diagonal().setZero();
    // Symmetrize roundoff so the invariants hold exactly.
    j = ((j + j.transpose()) / 2.0).eval();
    Eigen::MatrixXd refl(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) refl(i, k) = j(n - 1 - i, n - 1 - k);
    j = ((j + refl) / 2.0).eval();
    return CouplingMatrix(j);
}

double fit_power_law(const CouplingMatrix& J, const IonChain& chain) {
    const int n = J.n();
    if (chain.n_ions() != n) throw ShapeError("fit_power_law: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (J(i, j) <= 0.0)
                throw DomainError("fit_power_law: non-positive coupling J(" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
            const double x = std::log(std::abs(chain.positions[i] - chain.positions[j]));
            const double y = std::log(J(i, j));
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return -slope;
}

CouplingMatrix power_law_couplings(int n, double alpha, double j0) {
    if (alpha < 0.0) throw DomainError("power_law_couplings: alpha must be >= 0");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (i != k) j(i, k) = j0 / std::pow(std::abs(i - k), alpha);
    return CouplingMatrix(j);
}

}  // namespace spinramp
