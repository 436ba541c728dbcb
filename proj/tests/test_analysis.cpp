#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spinramp/analysis.hpp"
#include "spinramp/propagator.hpp"

using namespace spinramp;

namespace {

const Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

VectorXc random_state(Eigen::Index dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    VectorXc v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = Complex(gauss(rng), gauss(rng));
    return v / v.norm();
}

}  // namespace

TEST_CASE("spectrum basics") {
    SUBCASE("sigma^x energies") {
        const SpectrumResult spec = spectrum(pauli_site(0, PauliAxis::X, 1));
        CHECK(spec.energies[0] == doctest::Approx(-1.0));
        CHECK(spec.energies[1] == doctest::Approx(1.0));
    }
    SUBCASE("eigenpair residuals and orthonormality") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(4, 1.0, 1.0), +1, 0.9);
        const SpectrumResult spec = spectrum(h);
        const MatrixXc hd = h.dense();
        const double scale = h.max_abs();
        for (Eigen::Index m = 0; m < spec.energies.size(); ++m) {
            const VectorXc v = spec.eigenvectors.col(m);
            CHECK((hd * v - spec.energies[m] * v).norm() < 1e-9 * scale);
        }
        const MatrixXc gram = spec.eigenvectors.adjoint() * spec.eigenvectors;
        CHECK((gram - MatrixXc::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("diagonal fast path agrees with the dense path") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.0);
        REQUIRE(h.is_diagonal());
        const SpectrumResult fast = spectrum(h);
        // Force the dense route by adding a numerically irrelevant off-diagonal.
        SpinOperator bumped = h + Complex(1e-13, 0) * pauli_site(0, PauliAxis::X, 3);
        const SpectrumResult dense = spectrum(bumped);
        for (Eigen::Index m = 0; m < fast.energies.size(); ++m)
            CHECK(fast.energies[m] == doctest::Approx(dense.energies[m]).epsilon(1e-10));
    }
    SUBCASE("non-Hermitian input is rejected") {
        std::vector<Triplet> t = {{0, 1, Complex(1, 0)}};
        CHECK_THROWS_AS(spectrum(SpinOperator(2, t)), HermiticityError);
    }
}

TEST_CASE("parity labels on the degenerate ferromagnetic doublet") {
    const SpinOperator h = tfim_hamiltonian(power_law_couplings(4, 1.0, 1.0), +1, 0.0);
    const SpectrumResult spec = spectrum(h);
    REQUIRE(spec.has_flip_parity);
    REQUIRE(spec.has_spatial_parity);
    CHECK(spec.energies[1] - spec.energies[0] < 1e-12);
    CHECK(spec.parity_flip[0] * spec.parity_flip[1] == -1);
    CHECK(spec.parity_spatial[0] == 1);
    CHECK(spec.parity_spatial[1] == 1);
}

TEST_CASE("overlap decomposition") {
    const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.7);
    const SpectrumResult spec = spectrum(h);

    SUBCASE("an eigenvector decomposes onto itself") {
        const StateVector psi(spec.eigenvectors.col(2), 3);
        const OverlapDecomposition dec = decompose(psi, spec);
        CHECK(std::abs(dec.overlaps[2]) == doctest::Approx(1.0).epsilon(1e-12));
        for (Eigen::Index m = 0; m < 8; ++m)
            if (m != 2) CHECK(std::abs(dec.overlaps[m]) < 1e-12);
    }
    SUBCASE("an equal superposition splits its weight") {
        VectorXc v = (spec.eigenvectors.col(0) + spec.eigenvectors.col(1)) / std::sqrt(2.0);
        const OverlapDecomposition dec = decompose(StateVector(v, 3), spec);
        CHECK(std::norm(dec.overlaps[0]) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::norm(dec.overlaps[1]) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("random states satisfy completeness") {
        const OverlapDecomposition dec = decompose(StateVector(random_state(8, 3), 3), spec);
        CHECK(std::abs(dec.overlaps.squaredNorm() - 1.0) < 1e-10);
    }
    SUBCASE("an incomplete basis is reported") {
        SpectrumResult doctored = spec;
        doctored.eigenvectors.col(5).setZero();
        CHECK_THROWS_AS(decompose(StateVector(random_state(8, 4), 3), doctored),
                        ConsistencyError);
    }
}

TEST_CASE("ground-state probability with a degenerate manifold") {
    SUBCASE("nondegenerate case is |P_1|^2") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.7);
        const SpectrumResult spec = spectrum(h);
        const StateVector psi(random_state(8, 17), 3);
        const OverlapDecomposition dec = decompose(psi, spec);
        CHECK(ground_state_probability(dec, 1e-6) ==
              doctest::Approx(std::norm(dec.overlaps[0])).epsilon(1e-12));
    }
    SUBCASE("classical all-up state covers the full doublet") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.0);
        const SpectrumResult spec = spectrum(h);
        VectorXc up = VectorXc::Zero(8);
        up[0] = 1;
        const OverlapDecomposition dec = decompose(StateVector(up, 3), spec);
        CHECK(ground_state_probability(dec, 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
        // Each cat state individually holds half the weight.
        CHECK(std::norm(dec.overlaps[0]) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("a state orthogonal to the manifold scores zero") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.0);
        const SpectrumResult spec = spectrum(h);
        VectorXc v = VectorXc::Zero(8);
        v[1] = 1;  // one flipped spin, outside the ferromagnetic pair
        const OverlapDecomposition dec = decompose(StateVector(v, 3), spec);
        CHECK(ground_state_probability(dec, 1e-6) < 1e-12);
    }
}

TEST_CASE("amplitude extraction") {
    SUBCASE("unit sinusoid") {
        std::vector<double> ts, vs;
        for (int k = 0; k < 3000; ++k) {
            ts.push_back(k * 1e-3);
            vs.push_back(std::sin(2 * kPi * ts.back()));
        }
        const AmplitudeResult r = extract_amplitude(ts, vs, 0.0);
        CHECK(!r.flat);
        CHECK(r.amplitude == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(r.t_max == doctest::Approx(0.25).epsilon(1e-3));
        CHECK(r.t_min == doctest::Approx(0.75).epsilon(1e-3));
    }
    SUBCASE("constant series is flagged flat") {
        std::vector<double> ts(100), vs(100, 0.7);
        for (int k = 0; k < 100; ++k) ts[k] = k * 0.01;
        const AmplitudeResult r = extract_amplitude(ts, vs, 0.0);
        CHECK(r.flat);
        CHECK(r.amplitude == 0.0);
    }
    SUBCASE("global window catches the full excursion of a beat") {
        std::vector<double> ts, vs;
        for (int k = 0; k < 20000; ++k) {
            ts.push_back(k * 1e-3);
            vs.push_back(std::sin(3.0 * ts.back()) + 0.5 * std::sin(3.7 * ts.back()));
        }
        const AmplitudeResult gw =
            extract_amplitude(ts, vs, 0.0, AmplitudeMethod::GlobalWindow);
        CHECK(gw.amplitude > 1.2);
        const AmplitudeResult fe = extract_amplitude(ts, vs, 0.0);
        CHECK(fe.amplitude <= gw.amplitude + 1e-12);
    }
    SUBCASE("t_start is honored") {
        std::vector<double> ts, vs;
        for (int k = 0; k < 4000; ++k) {
            ts.push_back(k * 1e-3);
            vs.push_back(ts.back() < 2.0 ? 5.0 * std::sin(9.0 * ts.back())
                                         : std::sin(2 * kPi * ts.back()));
        }
        const AmplitudeResult r = extract_amplitude(ts, vs, 2.1);
        CHECK(r.t_max > 2.1);
        CHECK(r.amplitude == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("series reconstruction from the overlap sum") {
    SUBCASE("a single eigenstate gives a constant series") {
        const SpinOperator h = tfim_hamiltonian(power_law_couplings(3, 1.0, 1.0), +1, 0.7);
        const SpectrumResult spec = spectrum(h);
        const SpinOperator obs = rotated_magnetization(kPi / 2, 3);
        const OverlapDecomposition dec =
            decompose(StateVector(spec.eigenvectors.col(1), 3), spec);
        const std::vector<double> times = {0.0, 0.5, 1.0, 2.0};
        const std::vector<double> series = reconstruct_series(dec, obs, spec, times);
        const double expected =
            spec.eigenvectors.col(1).dot(obs.apply_raw(spec.eigenvectors.col(1))).real();
        for (const double v : series) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("matches the measured post-quench series pointwise") {
        const ModelSpec model = ModelSpec::tfim(power_law_couplings(3, 1.0, 1.0), +1);
        FieldSchedule s;
        s.kind = ScheduleKind::Exponential;
        s.b0 = 5.0;
        s.tau = 0.4;
        s.t_stop = 2.4;
        s.post_stop = PostStop::QuenchToZero;
        IntegratorConfig cfg;
        cfg.dt = 2e-4;
        cfg.record_stride = 25;
        const SpinOperator obs = rotated_magnetization(kPi / 2, 3);
        Trajectory traj = evolve(model, s, cfg, s.t_stop + 6.0, {{"m", obs}});

        const SpinOperator h_final = hamiltonian_at(model, s, s.t_stop + 1.0);
        const SpectrumResult spec = spectrum(h_final);
        const VectorXc stop = traj.state_at_stop / traj.state_at_stop.norm();
        const OverlapDecomposition dec = decompose(StateVector::from_raw(stop, 3), spec);

        std::vector<double> rel_times;
        std::vector<size_t> picks;
        for (size_t k = 0; k < traj.times.size(); ++k)
            if (traj.times[k] >= s.t_stop) {
                picks.push_back(k);
                rel_times.push_back(traj.times[k] - s.t_stop);
            }
        const std::vector<double> recon = reconstruct_series(dec, obs, spec, rel_times);
        double worst = 0.0;
        for (size_t k = 0; k < picks.size(); ++k)
            worst = std::max(worst,
                             std::abs(recon[k] - traj.observables.at("m")[picks[k]]));
        CHECK(worst < 1e-6);
    }
    SUBCASE("two-level case reduces to the product-of-overlaps amplitude") {
        const SpinOperator h = lz_hamiltonian(20.0);
        const SpectrumResult spec = spectrum(h);
        const SpinOperator obs = rotated_magnetization(kPi / 2, 1);
        const double phi = 0.3;
        VectorXc v = std::cos(phi) * spec.eigenvectors.col(0) +
                     std::sin(phi) * spec.eigenvectors.col(1);
        const OverlapDecomposition dec = decompose(StateVector(v, 1), spec);

        std::vector<double> times;
        for (int k = 0; k < 4000; ++k) times.push_back(k * 1e-3);
        const std::vector<double> series = reconstruct_series(dec, obs, spec, times);
        const AmplitudeResult amp = extract_amplitude(times, series, 0.0);
        const Complex o12 = spec.eigenvectors.col(0).dot(obs.apply_raw(spec.eigenvectors.col(1)));
        const double expected = std::abs(2.0 * std::cos(phi) * std::sin(phi) * o12);
        CHECK(amp.amplitude == doctest::Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("oscillation spectroscopy") {
    SUBCASE("a pure tone lands in one refined bin") {
        std::vector<double> ts, vs;
        const double dt = 0.01;
        for (int k = 0; k < 4000; ++k) {
            ts.push_back(k * dt);
            vs.push_back(std::sin(2.0 * ts.back()));
        }
        const auto peaks = oscillation_spectrum(ts, vs);
        REQUIRE(!peaks.empty());
        const double bin = 2.0 * kPi / (4000 * dt);
        CHECK(std::abs(peaks.front().angular_frequency - 2.0) < bin);
    }
    SUBCASE("quench peaks sit on eigenvalue differences") {
        const ModelSpec model = ModelSpec::tfim(power_law_couplings(4, 1.0, 1.0), +1);
        FieldSchedule s;
        s.kind = ScheduleKind::Exponential;
        s.b0 = 5.0;
        s.tau = 0.3;
        s.t_stop = 1.8;
        s.post_stop = PostStop::QuenchToZero;
        IntegratorConfig cfg;
        cfg.dt = 1e-3;
        cfg.record_stride = 5;
        const SpinOperator obs = rotated_magnetization(kPi / 2, 4);
        const double window = 40.0;
        Trajectory traj = evolve(model, s, cfg, s.t_stop + window, {{"m", obs}});

        std::vector<double> ts, vs;
        for (size_t k = 0; k < traj.times.size(); ++k)
            if (traj.times[k] >= s.t_stop) {
                ts.push_back(traj.times[k]);
                vs.push_back(traj.observables.at("m")[k]);
            }
        const auto peaks = oscillation_spectrum(ts, vs);
        REQUIRE(!peaks.empty());

        const SpectrumResult spec = spectrum(hamiltonian_at(model, s, s.t_stop + 1.0));
        const double bin = 2.0 * kPi / window;
        for (const auto& peak : peaks) {
            double best = 1e300;
            for (Eigen::Index m = 0; m < spec.energies.size(); ++m)
                for (Eigen::Index n = 0; n < spec.energies.size(); ++n) {
                    const double gap = spec.energies[n] - spec.energies[m];
                    if (gap > 1e-9)
                        best = std::min(best, std::abs(peak.angular_frequency - gap));
                }
            CHECK(best < bin);
        }
    }
    SUBCASE("too little data is an error") {
        std::vector<double> ts(8), vs(8, 0.0);
        for (int k = 0; k < 8; ++k) ts[k] = k * 0.1;
        CHECK_THROWS_AS(oscillation_spectrum(ts, vs), InsufficientDataError);
    }
}

TEST_CASE("analytic two-level curves") {
    std::vector<double> phi;
    for (int k = 0; k <= 90; ++k) phi.push_back(kPi / 2 * k / 90.0);
    const LzCurves curves = lz_analytic_curves(phi, kPi / 2);

    CHECK(curves.probability.front() == doctest::Approx(1.0));
    CHECK(curves.amplitude.front() == doctest::Approx(0.0));
    // Maximum at phi = pi/4 (grid point 45).
    for (size_t k = 0; k < phi.size(); ++k)
        CHECK(curves.amplitude[45] >= curves.amplitude[k] - 1e-15);
    // Mirror symmetry around pi/4.
    for (size_t k = 0; k <= 90; ++k)
        CHECK(std::abs(curves.amplitude[k] - curves.amplitude[90 - k]) < 1e-12);
}

TEST_CASE("minimal gap scans") {
    SUBCASE("two-level gap is smallest at zero field") {
        std::vector<double> fields;
        for (double b = -2.0; b <= 2.0 + 1e-12; b += 0.1) fields.push_back(b);
        const GapScanResult res = minimal_gap_scan(ModelSpec::landau_zener(), fields);
        CHECK(res.used_parity_fallback);
        CHECK(std::abs(res.b_star) < 1e-9);
        CHECK(res.gap_star == doctest::Approx(2.0).epsilon(1e-4));
        for (size_t k = 0; k < fields.size(); ++k)
            CHECK(res.coupled_gaps[k] ==
                  doctest::Approx(2.0 * std::sqrt(1.0 + fields[k] * fields[k])).epsilon(1e-9));
    }
    SUBCASE("two-site chain matches the closed-form coupled gap") {
        const ModelSpec model = ModelSpec::tfim(power_law_couplings(2, 1.0, 1.0), +1);
        std::vector<double> fields;
        for (double b = 0.1; b <= 2.0 + 1e-12; b += 0.1) fields.push_back(b);
        const GapScanResult res = minimal_gap_scan(model, fields);
        CHECK(!res.used_parity_fallback);
        for (size_t k = 0; k < fields.size(); ++k) {
            const double b = fields[k];
            CHECK(res.coupled_gaps[k] ==
                  doctest::Approx(2.0 * std::sqrt(1.0 + 4.0 * b * b)).epsilon(1e-9));
        }
    }
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(minimal_gap_scan(ModelSpec::landau_zener(), {}), DomainError);
        CHECK_THROWS_AS(minimal_gap_scan(ModelSpec::landau_zener(), {1.0, 0.5}), DomainError);
    }
}
