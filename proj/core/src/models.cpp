#include "spinramp/models.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "spinramp/analysis.hpp"

namespace spinramp {

ModelSpec ModelSpec::landau_zener() {
    ModelSpec m;
    m.kind = ModelKind::LandauZener;
    m.n_sites = 1;
    return m;
}

ModelSpec ModelSpec::tfim(CouplingMatrix couplings, int j_sign) {
    ModelSpec m;
    m.kind = ModelKind::Tfim;
    m.n_sites = couplings.n();
    m.couplings = std::move(couplings);
    m.j_sign = j_sign;
    return m;
}

SpinOperator lz_hamiltonian(double bz) {
    std::vector<Triplet> t = {
        {0, 0, Complex(bz, 0)},
        {0, 1, Complex(1, 0)},
        {1, 0, Complex(1, 0)},
        {1, 1, Complex(-bz, 0)},
    };
    return SpinOperator(2, t);
}

SpinOperator tfim_hamiltonian(const CouplingMatrix& J, int j_sign, double bx) {
    const int n = J.n();
    const Eigen::Index dim = Eigen::Index(1) << n;
    std::vector<Triplet> t;
    t.reserve(static_cast<size_t>(dim) * (n + 1));

    // Ising part: diagonal in the computational basis.
    for (Eigen::Index b = 0; b < dim; ++b) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double si = (b & (Eigen::Index(1) << (n - 1 - i))) ? -1.0 : 1.0;
            for (int j = i + 1; j < n; ++j) {
                const double sj = (b & (Eigen::Index(1) << (n - 1 - j))) ? -1.0 : 1.0;
                e -= j_sign * J(i, j) * si * sj;
            }
        }
        if (e != 0.0) t.emplace_back(b, b, Complex(e, 0));
    }
    // Transverse field: one spin flip per site.
    if (bx != 0.0)
        for (int i = 0; i < n; ++i) {
            const Eigen::Index bit = Eigen::Index(1) << (n - 1 - i);
            for (Eigen::Index b = 0; b < dim; ++b)
                t.emplace_back(b ^ bit, b, Complex(-bx, 0));
        }
    return SpinOperator(dim, t);
}

double field_at(const FieldSchedule& schedule, double t) {
    if (t > schedule.t_stop)
        return schedule.post_stop == PostStop::QuenchToZero
                   ? 0.0
                   : field_at(schedule, schedule.t_stop);
    switch (schedule.kind) {
        case ScheduleKind::Linear: return schedule.tau * t + schedule.b0;
        case ScheduleKind::Exponential: return schedule.b0 * std::exp(-t / schedule.tau);
        case ScheduleKind::Constant: return schedule.b0;
    }
    return schedule.b0;
}

SpinOperator hamiltonian_at(const ModelSpec& model, const FieldSchedule& schedule, double t) {
    const double field = field_at(schedule, t);
    switch (model.kind) {
        case ModelKind::LandauZener:
            return lz_hamiltonian(field);
        case ModelKind::Tfim:
            if (!model.couplings)
                throw ShapeError("hamiltonian_at: Tfim model without couplings");
            if (model.couplings->n() != model.n_sites)
                throw ShapeError("hamiltonian_at: coupling dimension mismatch");
            return tfim_hamiltonian(*model.couplings, model.j_sign, field);
    }
    throw ShapeError("hamiltonian_at: unknown model kind");
}

StateVector initial_state(const ModelSpec& model, const FieldSchedule& schedule) {
    const SpinOperator h0 = hamiltonian_at(model, schedule, 0.0);
    const SpectrumResult spec = spectrum(h0, SpectrumOptions{.compute_parities = false});
    const double scale = std::max(1.0, std::abs(spec.energies[spec.energies.size() - 1]));
    if (spec.energies.size() > 1 && spec.energies[1] - spec.energies[0] < 1e-9 * scale)
        throw DegeneracyError("initial_state: ground state degenerate at t=0; "
                              "the polarizing field must lift the degeneracy");
    VectorXc ground = spec.eigenvectors.col(0);
    return StateVector(std::move(ground), model.n_sites);
}

}  // namespace spinramp
