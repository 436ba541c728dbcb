#include "spinramp/propagator.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "spinramp/analysis.hpp"

namespace spinramp {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr Eigen::Index kDenseSolveDim = 64;

// y = (I + i dt/2 (H - shift)) x
VectorXc cayley_plus_apply(const SpinOperator& h, double shift, double dt, const VectorXc& x) {
    VectorXc hx = h.apply_raw(x);
    if (shift != 0.0) hx -= shift * x;
    return x + kI * (0.5 * dt) * hx;
}

double relative_residual(const SpinOperator& h, double shift, double dt,
                         const VectorXc& x, const VectorXc& rhs, double psi_norm) {
    return (cayley_plus_apply(h, shift, dt, x) - rhs).norm() / psi_norm;
}

// Matrix-free BiCGSTAB for (I + i dt/2 (H - shift)) x = rhs. The operator is
// a small perturbation of the identity at sane dt, so this converges in a
// handful of iterations.
VectorXc bicgstab_solve(const SpinOperator& h, double shift, double dt,
                        const VectorXc& rhs, double tol, int max_iter) {
    VectorXc x = rhs;  // warm start: A is close to I
    VectorXc r = rhs - cayley_plus_apply(h, shift, dt, x);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return VectorXc::Zero(rhs.size());
    if (r.norm() / rhs_norm <= tol) return x;

    const VectorXc r0 = r;
    Complex rho(1, 0), alpha(1, 0), omega(1, 0);
    VectorXc v = VectorXc::Zero(rhs.size());
    VectorXc p = VectorXc::Zero(rhs.size());

    for (int it = 0; it < max_iter; ++it) {
        const Complex rho_new = r0.dot(r);
        if (std::abs(rho_new) < 1e-300) break;  // breakdown; bail to residual check
        const Complex beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = r + beta * (p - omega * v);
        v = cayley_plus_apply(h, shift, dt, p);
        const Complex r0v = r0.dot(v);
        if (std::abs(r0v) < 1e-300) break;
        alpha = rho / r0v;
        const VectorXc s = r - alpha * v;
        if (s.norm() / rhs_norm <= tol) {
            x += alpha * p;
            return x;
        }
        const VectorXc t = cayley_plus_apply(h, shift, dt, s);
        const double tt = t.squaredNorm();
        if (tt == 0.0) break;
        omega = t.dot(s) / tt;
        x += alpha * p + omega * s;
        r = s - omega * t;
        if (r.norm() / rhs_norm <= tol) return x;
    }
    return x;
}

// Core implicit solve shared by cn_step and evolve.
VectorXc cn_solve(const SpinOperator& h_next, double shift, double dt,
                  const VectorXc& rhs, double tol, double psi_norm) {
    VectorXc x;
    if (h_next.dim() <= kDenseSolveDim) {
        MatrixXc a = kI * (0.5 * dt) * h_next.dense();
        if (shift != 0.0) a.diagonal().array() -= kI * (0.5 * dt) * shift;
        a.diagonal().array() += 1.0;
        x = a.partialPivLu().solve(rhs);
    } else if (h_next.is_diagonal()) {
        VectorXc d = VectorXc::Zero(h_next.dim());
        for (const auto& e : h_next.entries()) d[e.row()] = e.value();
        x.resize(rhs.size());
        for (Eigen::Index k = 0; k < rhs.size(); ++k)
            x[k] = rhs[k] / (1.0 + kI * (0.5 * dt) * (d[k] - shift));
    } else {
        x = bicgstab_solve(h_next, shift, dt, rhs, 0.25 * tol, 500);
    }
    const double res = relative_residual(h_next, shift, dt, x, rhs, psi_norm);
    if (res > tol)
        throw SolverError("cn_step: solver reached residual " + std::to_string(res) +
                          " above tolerance " + std::to_string(tol), res);
    return x;
}

struct Segment {
    double t0 = 0.0;
    double dt = 0.0;
    long n_steps = 0;
};

Segment make_segment(double t0, double length, double dt, int stride) {
    Segment s;
    s.t0 = t0;
    if (length <= 0.0) return s;
    const double blocks = length / (dt * stride);
    s.n_steps = stride * static_cast<long>(std::ceil(blocks - 1e-9));
    if (s.n_steps < stride) s.n_steps = stride;
    s.dt = length / static_cast<double>(s.n_steps);
    return s;
}

}  // namespace

VectorXc cn_step(const SpinOperator& h_now, const SpinOperator& h_next,
                 const VectorXc& psi, double dt, double tol) {
    if (h_now.dim() != psi.size() || h_next.dim() != psi.size())
        throw ShapeError("cn_step: dimension mismatch");
    if (dt <= 0.0) throw DomainError("cn_step: dt must be positive");
    const VectorXc rhs = psi - kI * (0.5 * dt) * h_now.apply_raw(psi);
    const double psi_norm = psi.norm();
    return cn_solve(h_next, 0.0, dt, rhs, tol, psi_norm > 0 ? psi_norm : 1.0);
}

Trajectory evolve(const ModelSpec& model, const FieldSchedule& schedule,
                  const IntegratorConfig& config, double t_end,
                  const std::vector<std::pair<std::string, SpinOperator>>& observables) {
    if (t_end < schedule.t_stop)
        throw DomainError("evolve: t_end must not precede t_stop");
    if (config.dt <= 0.0 || config.record_stride < 1)
        throw DomainError("evolve: bad integrator configuration");

    const StateVector psi0 = initial_state(model, schedule);
    VectorXc psi = psi0.amplitudes();

    Trajectory traj;
    traj.t_stop = schedule.t_stop;
    for (const auto& [name, op] : observables) {
        if (op.dim() != psi.size()) throw ShapeError("evolve: observable dimension mismatch");
        traj.observables[name] = {};
    }
    traj.observables["energy"] = {};

    const Segment ramp = make_segment(0.0, schedule.t_stop, config.dt, config.record_stride);
    const Segment hold = make_segment(schedule.t_stop, t_end - schedule.t_stop,
                                      config.dt, config.record_stride);

    double phase = 0.0;  // accumulated mean-energy gauge phase
    SpinOperator h_now = hamiltonian_at(model, schedule, 0.0);

    auto record = [&](double t, double energy) {
        traj.times.push_back(t);
        const double nrm = psi.norm();
        traj.norms.push_back(nrm);
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(nrm - 1.0));
        traj.observables["energy"].push_back(energy);
        for (const auto& [name, op] : observables)
            traj.observables[name].push_back(expectation(op, psi) / (nrm * nrm));
        if (config.retain_states)
            traj.states.push_back(std::exp(-kI * phase) * psi);
    };

    // t_max clamps the h(t+dt) evaluation so roundoff in the ramp grid can
    // never sample past t_stop (where a quench would switch the Hamiltonian
    // half a step early).
    auto run_segment = [&](const Segment& seg, bool constant_h, double t_max) {
        if (seg.n_steps == 0) return;
        SpinOperator h_next = h_now;
        for (long k = 0; k < seg.n_steps; ++k) {
            const double t = seg.t0 + static_cast<double>(k) * seg.dt;
            const VectorXc h_psi = h_now.apply_raw(psi);
            const double nrm2 = psi.squaredNorm();
            const double c = psi.dot(h_psi).real() / nrm2;
            if (k % config.record_stride == 0) record(t, c);
            if (!constant_h)
                h_next = hamiltonian_at(model, schedule, std::min(t + seg.dt, t_max));
            const VectorXc rhs = psi - kI * (0.5 * seg.dt) * (h_psi - c * psi);
            psi = cn_solve(h_next, c, seg.dt, rhs, config.solver_tolerance, std::sqrt(nrm2));
            phase += c * seg.dt;
            if (!constant_h) h_now = h_next;
        }
    };

    run_segment(ramp, false, schedule.t_stop);
    traj.state_at_stop = std::exp(-kI * phase) * psi;

    if (hold.n_steps > 0) {
        // Step boundary rule: every step starting at t_stop uses the
        // post-stop Hamiltonian (field held, or already quenched to zero).
        h_now = hamiltonian_at(model, schedule, schedule.t_stop + 0.5 * hold.dt);
        run_segment(hold, true, t_end);
    }

    {
        const VectorXc h_psi = h_now.apply_raw(psi);
        record(t_end, psi.dot(h_psi).real() / psi.squaredNorm());
    }
    traj.final_state = std::exp(-kI * phase) * psi;
    if (hold.n_steps == 0) traj.state_at_stop = traj.final_state;

    if (traj.max_norm_drift > 1e-4)
        throw ConsistencyError("evolve: cumulative norm drift " +
                               std::to_string(traj.max_norm_drift) + " exceeds 1e-4");
    return traj;
}

Trajectory exact_reference(const ModelSpec& model, const FieldSchedule& schedule,
                           double grid_dt, double t_end,
                           const std::vector<std::pair<std::string, SpinOperator>>& observables) {
    const Eigen::Index dim = Eigen::Index(1) << model.n_sites;
    if (dim > (Eigen::Index(1) << 8))
        throw CapabilityError("exact_reference: dimension above 2^8 cap");
    if (t_end < schedule.t_stop)
        throw DomainError("exact_reference: t_end must not precede t_stop");

    const StateVector psi0 = initial_state(model, schedule);
    VectorXc psi = psi0.amplitudes();

    Trajectory traj;
    traj.t_stop = schedule.t_stop;
    for (const auto& [name, op] : observables) traj.observables[name] = {};
    traj.observables["energy"] = {};

    const Segment ramp = make_segment(0.0, schedule.t_stop, grid_dt, 1);
    const Segment hold = make_segment(schedule.t_stop, t_end - schedule.t_stop, grid_dt, 1);

    SpinOperator h_now = hamiltonian_at(model, schedule, 0.0);

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.norms.push_back(psi.norm());
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(psi.norm() - 1.0));
        traj.observables["energy"].push_back(expectation(h_now, psi));
        for (const auto& [name, op] : observables)
            traj.observables[name].push_back(expectation(op, psi));
        traj.states.push_back(psi);
    };

    auto run_segment = [&](const Segment& seg, bool constant_h, double t_max) {
        if (seg.n_steps == 0) return;
        Eigen::SelfAdjointEigenSolver<MatrixXc> es;
        if (constant_h) es.compute(h_now.dense());
        for (long k = 0; k < seg.n_steps; ++k) {
            const double t = seg.t0 + static_cast<double>(k) * seg.dt;
            record(t);
            if (!constant_h) {
                // Freeze at the step midpoint so the reference is second
                // order on ramps; the dt-convergence check of the CN stepper
                // measures the difference between the two schemes.
                h_now = hamiltonian_at(model, schedule, std::min(t + 0.5 * seg.dt, t_max));
                es.compute(h_now.dense());
            }
            const VectorXc coeff = es.eigenvectors().adjoint() * psi;
            VectorXc advanced(coeff.size());
            for (Eigen::Index m = 0; m < coeff.size(); ++m)
                advanced[m] = coeff[m] * std::exp(-kI * es.eigenvalues()[m] * seg.dt);
            psi = es.eigenvectors() * advanced;
        }
        if (!constant_h)
            h_now = hamiltonian_at(model, schedule,
                                   std::min(seg.t0 + seg.n_steps * seg.dt, t_max));
    };

    run_segment(ramp, false, schedule.t_stop);
    traj.state_at_stop = psi;
    if (hold.n_steps > 0) {
        h_now = hamiltonian_at(model, schedule, schedule.t_stop + 0.5 * hold.dt);
        run_segment(hold, true, t_end);
    }
    record(t_end);
    traj.final_state = psi;
    if (hold.n_steps == 0) traj.state_at_stop = traj.final_state;
    return traj;
}

}  // namespace spinramp
