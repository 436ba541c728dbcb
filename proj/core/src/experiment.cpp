#include "spinramp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "spinramp/csv.hpp"

namespace spinramp {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string theta_series_name(double theta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "theta_%.6g", theta);
    return buf;
}

// Lowest gap above the ground manifold that the protocol observable can
// oscillate at: the first coupled excited state when parity labels exist,
// the first resolvable gap otherwise.
double window_gap(const SpectrumResult& spec) {
    const double scale = std::max(1.0, std::abs(spec.energies[spec.energies.size() - 1]));
    if (spec.has_flip_parity && spec.has_spatial_parity) {
        const int f0 = spec.parity_flip[0];
        const int s0 = spec.parity_spatial[0];
        for (Eigen::Index m = 1; m < spec.energies.size(); ++m)
            if (spec.parity_flip[static_cast<size_t>(m)] == f0 &&
                spec.parity_spatial[static_cast<size_t>(m)] == s0 &&
                spec.energies[m] - spec.energies[0] > 1e-9 * scale)
                return spec.energies[m] - spec.energies[0];
    }
    for (Eigen::Index m = 1; m < spec.energies.size(); ++m)
        if (spec.energies[m] - spec.energies[0] > 1e-6 * scale)
            return spec.energies[m] - spec.energies[0];
    throw ConsistencyError("window_gap: final Hamiltonian has no resolvable gap");
}

void run_parallel(int jobs, int n_tasks, const std::function<void(int)>& task) {
    if (jobs <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min(jobs, n_tasks);
    pool.reserve(static_cast<size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
        });
    for (auto& th : pool) th.join();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_resolved_config(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::string text;
    for (const auto& [k, v] : cfg.resolved()) text += k + " = " + v + "\n";
    write_text(out_dir + "/resolved_config.txt", text);
}

}  // namespace

double dynamical_phase_per_j0(ModelKind kind) {
    return kind == ModelKind::Tfim ? std::numbers::pi : 1.0;
}

CouplingMatrix couplings_in_j0(const ExperimentConfig& cfg) {
    if (cfg.coupling_source == "power_law")
        return power_law_couplings(cfg.n_sites, cfg.alpha, cfg.j0);
    const IonChain chain = make_ion_chain(cfg.n_sites, cfg.beta);
    const PhononModes modes = transverse_modes(chain);
    return jij_matrix(modes, CouplingParams{cfg.mu, cfg.j_prefactor, cfg.j_sign});
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
    BuiltExperiment built;
    built.energy_unit = dynamical_phase_per_j0(cfg.model_kind);

    FieldSchedule sched;
    sched.kind = cfg.schedule_kind;
    sched.tau = cfg.tau;
    sched.post_stop = cfg.post_stop;

    if (cfg.model_kind == ModelKind::LandauZener) {
        built.model = ModelSpec::landau_zener();
        sched.b0 = cfg.b0;
        if (cfg.schedule_kind == ScheduleKind::Linear) {
            if (cfg.b_stop_target <= cfg.b0)
                throw ConfigError("schedule.b_stop must exceed schedule.b0 for a rising ramp");
            sched.t_stop = (cfg.b_stop_target - cfg.b0) / cfg.tau;
            // Linear kind stores the rate in tau directly.
        } else {
            sched.t_stop = cfg.t_stop_factor * cfg.tau;
        }
    } else {
        CouplingMatrix j_j0 = couplings_in_j0(cfg);
        built.model = ModelSpec::tfim(
            CouplingMatrix(built.energy_unit * j_j0.values()), cfg.j_sign);
        sched.b0 = built.energy_unit * cfg.b0;
        sched.t_stop = cfg.t_stop_factor * cfg.tau;
    }

    built.schedule = sched;
    built.b_stop_j0 = field_at(sched, sched.t_stop) / built.energy_unit;
    return built;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
    const BuiltExperiment built = build_experiment(cfg);
    const double unit = built.energy_unit;

    // Final (post-stop) Hamiltonian and its spectrum drive the measurement
    // window and the overlap analysis.
    const SpinOperator h_final =
        hamiltonian_at(built.model, built.schedule,
                       built.schedule.t_stop + std::max(1.0, built.schedule.t_stop));
    const SpectrumResult spec_final = spectrum(h_final);

    double t_meas = cfg.t_meas;
    if (t_meas <= 0.0)
        t_meas = 4.0 * 2.0 * std::numbers::pi / window_gap(spec_final);

    std::vector<std::pair<std::string, SpinOperator>> observables;
    observables.reserve(cfg.thetas.size());
    for (const double theta : cfg.thetas)
        observables.emplace_back(theta_series_name(theta),
                                 rotated_magnetization(theta, cfg.n_sites));

    IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    icfg.solver_tolerance = cfg.solver_tolerance;
    icfg.record_stride = cfg.record_stride;

    const double t_end = built.schedule.t_stop + t_meas;
    Trajectory traj = evolve(built.model, built.schedule, icfg, t_end, observables);

    RunRecord rec;
    rec.config_snapshot = cfg.resolved();
    rec.tau = cfg.tau;
    rec.t_stop = built.schedule.t_stop;
    rec.b_stop = built.b_stop_j0;
    rec.t_meas = t_meas;
    rec.times = traj.times;
    rec.series = traj.observables;
    rec.series["norm"] = traj.norms;
    rec.max_norm_drift = traj.max_norm_drift;
    rec.timestamp = utc_timestamp();

    // Overlap decomposition of the stop state against the final eigenbasis.
    // CN norm drift is reported separately; the decomposition itself is
    // taken on the normalized state so completeness is meaningful.
    VectorXc stop = traj.state_at_stop / traj.state_at_stop.norm();
    const OverlapDecomposition dec =
        decompose(StateVector::from_raw(stop, cfg.n_sites), spec_final);
    rec.p_ground = ground_state_probability(dec, 1e-6 * unit);

    const int n_low = static_cast<int>(std::min<Eigen::Index>(8, spec_final.energies.size()));
    for (int m = 0; m < n_low; ++m) {
        rec.low_energies.push_back(spec_final.energies[m] / unit);
        rec.low_parity_flip.push_back(spec_final.parity_flip[static_cast<size_t>(m)]);
        rec.low_parity_spatial.push_back(spec_final.parity_spatial[static_cast<size_t>(m)]);
    }

    // Amplitudes per theta over the post-stop window.
    for (const double theta : cfg.thetas) {
        const auto& series = rec.series.at(theta_series_name(theta));
        rec.amplitudes.push_back(
            {theta, extract_amplitude(rec.times, series, rec.t_stop, cfg.amplitude_method)});
    }

    // Consistency gate: the measured post-stop series must agree with the
    // overlap-sum reconstruction on a subsample before anything persists.
    {
        size_t first = 0;
        while (first < rec.times.size() && rec.times[first] < rec.t_stop) ++first;
        const size_t count = rec.times.size() - first;
        const size_t stride = std::max<size_t>(1, count / 64);
        std::vector<double> rel_times;
        std::vector<size_t> picks;
        for (size_t k = first; k < rec.times.size(); k += stride) {
            picks.push_back(k);
            rel_times.push_back(rec.times[k] - rec.t_stop);
        }
        const auto& name0 = observables.front().first;
        const std::vector<double> recon =
            reconstruct_series(dec, observables.front().second, spec_final, rel_times);
        double dev = 0.0;
        for (size_t k = 0; k < picks.size(); ++k)
            dev = std::max(dev, std::abs(recon[k] - rec.series.at(name0)[picks[k]]));
        rec.closure_residual = dev;
        if (dev > 1e-3)
            throw ConsistencyError("run: measured series deviates from the overlap-sum "
                                   "reconstruction by " + std::to_string(dev));
    }
    return rec;
}

namespace {

ExperimentConfig config_with_tau(const ExperimentConfig& base, double tau) {
    ExperimentConfig c = base;
    c.tau = tau;
    return c;
}

}  // namespace

std::vector<SweepRow> sweep_tau(const ExperimentConfig& cfg, int jobs) {
    if (!std::is_sorted(cfg.sweep_values.begin(), cfg.sweep_values.end()))
        throw DomainError("sweep_tau: grid must be ascending");
    const int n_tau = static_cast<int>(cfg.sweep_values.size());
    const int n_theta = static_cast<int>(cfg.thetas.size());
    std::vector<SweepRow> rows(static_cast<size_t>(n_tau) * n_theta);

    run_parallel(jobs, n_tau, [&](int i) {
        const double tau = cfg.sweep_values[static_cast<size_t>(i)];
        try {
            const RunRecord rec = run_experiment(config_with_tau(cfg, tau));
            for (int j = 0; j < n_theta; ++j) {
                SweepRow& row = rows[static_cast<size_t>(i) * n_theta + j];
                row.primary = tau;
                row.secondary = rec.amplitudes[static_cast<size_t>(j)].theta;
                row.amplitude = rec.amplitudes[static_cast<size_t>(j)].result.amplitude;
                row.p_ground = rec.p_ground;
                row.t_stop = rec.t_stop;
                row.b_stop = rec.b_stop;
            }
        } catch (const std::exception& e) {
            for (int j = 0; j < n_theta; ++j) {
                SweepRow& row = rows[static_cast<size_t>(i) * n_theta + j];
                row.primary = tau;
                row.secondary = cfg.thetas[static_cast<size_t>(j)];
                row.error = e.what();
            }
        }
    });
    return rows;
}

std::string sweep_tau_csv(const std::vector<SweepRow>& rows) {
    CsvWriter csv({"tau", "theta", "amplitude", "p_ground", "t_stop", "b_stop", "error"});
    for (const auto& r : rows)
        csv.add_row({CsvWriter::num(r.primary), CsvWriter::num(r.secondary),
                     CsvWriter::num(r.amplitude), CsvWriter::num(r.p_ground),
                     CsvWriter::num(r.t_stop), CsvWriter::num(r.b_stop),
                     percent_encode(r.error)});
    return csv.str();
}

std::vector<SweepRow> sweep_stop(const ExperimentConfig& cfg, int jobs) {
    if (cfg.post_stop != PostStop::Hold)
        throw ConfigError("sweep_stop: requires schedule.post_stop = hold");
    if (cfg.schedule_kind != ScheduleKind::Exponential)
        throw ConfigError("sweep_stop: requires an exponential ramp");
    for (const double b : cfg.sweep_values)
        if (b <= 0.0 || b >= cfg.b0)
            throw DomainError("sweep_stop: target field " + std::to_string(b) +
                              " outside (0, b0)");

    const int n_b = static_cast<int>(cfg.sweep_values.size());
    const int n_tau = static_cast<int>(cfg.sweep_tau_values.size());
    std::vector<SweepRow> rows(static_cast<size_t>(n_b) * n_tau);
    const double theta_probe = cfg.thetas.back();

    run_parallel(jobs, n_b * n_tau, [&](int idx) {
        const int i = idx / n_tau;
        const int j = idx % n_tau;
        const double b_target = cfg.sweep_values[static_cast<size_t>(i)];
        const double tau = cfg.sweep_tau_values[static_cast<size_t>(j)];
        SweepRow& row = rows[static_cast<size_t>(idx)];
        row.primary = b_target;
        row.secondary = tau;
        try {
            ExperimentConfig c = cfg;
            c.tau = tau;
            c.t_stop_factor = std::log(cfg.b0 / b_target);
            c.thetas = {theta_probe};
            const RunRecord rec = run_experiment(c);
            row.amplitude = rec.amplitudes.front().result.amplitude;
            row.p_ground = rec.p_ground;
            row.t_stop = rec.t_stop;
            row.b_stop = rec.b_stop;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

std::string sweep_stop_csv(const std::vector<SweepRow>& rows) {
    CsvWriter csv({"b_stop", "tau", "amplitude", "p_ground", "error"});
    for (const auto& r : rows)
        csv.add_row({CsvWriter::num(r.primary), CsvWriter::num(r.secondary),
                     CsvWriter::num(r.amplitude), CsvWriter::num(r.p_ground),
                     percent_encode(r.error)});
    return csv.str();
}

GapScanResult gap_scan_j0(const ExperimentConfig& cfg) {
    const BuiltExperiment built = build_experiment(cfg);
    std::vector<double> fields_dyn;
    fields_dyn.reserve(cfg.spectrum_fields.size());
    for (const double b : cfg.spectrum_fields) fields_dyn.push_back(b * built.energy_unit);
    GapScanResult res = minimal_gap_scan(built.model, fields_dyn);
    res.b_star /= built.energy_unit;
    res.gap_star /= built.energy_unit;
    for (auto& b : res.fields) b /= built.energy_unit;
    for (auto& g : res.coupled_gaps) g /= built.energy_unit;
    return res;
}

SpectrumTable spectrum_table(const ExperimentConfig& cfg) {
    const BuiltExperiment built = build_experiment(cfg);
    SpectrumTable table;
    FieldSchedule probe;
    probe.kind = ScheduleKind::Constant;
    for (const double b : cfg.spectrum_fields) {
        probe.b0 = b * built.energy_unit;
        const SpectrumResult spec = spectrum(hamiltonian_at(built.model, probe, 0.0));
        const int levels =
            static_cast<int>(std::min<Eigen::Index>(cfg.spectrum_levels, spec.energies.size()));
        for (int m = 0; m < levels; ++m)
            table.rows.push_back({b, static_cast<double>(m),
                                  spec.energies[m] / built.energy_unit,
                                  static_cast<double>(spec.parity_flip[static_cast<size_t>(m)]),
                                  static_cast<double>(spec.parity_spatial[static_cast<size_t>(m)])});
    }
    table.gap = gap_scan_j0(cfg);
    return table;
}

CouplingsReport couplings_report(const ExperimentConfig& cfg) {
    CouplingsReport rep;
    if (cfg.coupling_source == "power_law") {
        rep.couplings = power_law_couplings(cfg.n_sites, cfg.alpha, cfg.j0);
        // Exponent fit against the integer lattice the surrogate lives on.
        Eigen::VectorXd pos(cfg.n_sites);
        for (int i = 0; i < cfg.n_sites; ++i) pos[i] = i - 0.5 * (cfg.n_sites - 1);
        rep.chain = IonChain{pos, 0.0};
        rep.has_chain = cfg.n_sites > 2;
        if (rep.has_chain) rep.alpha_fit = fit_power_law(rep.couplings, rep.chain);
        return rep;
    }
    rep.chain = make_ion_chain(cfg.n_sites, cfg.beta);
    rep.modes = transverse_modes(rep.chain);
    rep.couplings = jij_matrix(rep.modes, CouplingParams{cfg.mu, cfg.j_prefactor, cfg.j_sign});
    rep.has_chain = true;
    if (cfg.n_sites > 2) rep.alpha_fit = fit_power_law(rep.couplings, rep.chain);
    return rep;
}

void cmd_run(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const RunRecord rec = run_experiment(cfg);
    write_resolved_config(cfg, out_dir);

    // Time series.
    std::vector<std::string> header = {"time"};
    std::vector<std::string> keys;
    for (const auto& [name, series] : rec.series) {
        keys.push_back(name);
        header.push_back(name);
    }
    CsvWriter csv(header);
    for (size_t k = 0; k < rec.times.size(); ++k) {
        std::vector<std::string> row = {CsvWriter::num(rec.times[k])};
        for (const auto& key : keys) row.push_back(CsvWriter::num(rec.series.at(key)[k]));
        csv.add_row(std::move(row));
    }
    csv.write_file(out_dir + "/series.csv");

    nlohmann::json j;
    j["version"] = rec.version;
    j["timestamp"] = rec.timestamp;
    j["config"] = rec.config_snapshot;
    j["tau"] = rec.tau;
    j["t_stop"] = rec.t_stop;
    j["b_stop"] = rec.b_stop;
    j["t_meas"] = rec.t_meas;
    j["p_ground"] = rec.p_ground;
    j["max_norm_drift"] = rec.max_norm_drift;
    j["closure_residual"] = rec.closure_residual;
    j["amplitudes"] = nlohmann::json::array();
    for (const auto& a : rec.amplitudes)
        j["amplitudes"].push_back({{"theta", a.theta},
                                   {"amplitude", a.result.amplitude},
                                   {"t_max", a.result.t_max},
                                   {"t_min", a.result.t_min},
                                   {"flat", a.result.flat},
                                   {"method", a.result.method == AmplitudeMethod::FirstExtrema
                                                  ? "first_extrema"
                                                  : "global_window"}});
    j["spectrum_summary"] = {{"energies", rec.low_energies},
                             {"parity_flip", rec.low_parity_flip},
                             {"parity_spatial", rec.low_parity_spatial}};
    write_text(out_dir + "/run_record.json", j.dump(2) + "\n");
}

void cmd_sweep_tau(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    std::filesystem::create_directories(out_dir);
    write_resolved_config(cfg, out_dir);
    write_text(out_dir + "/sweep_tau.csv", sweep_tau_csv(sweep_tau(cfg, jobs)));
}

void cmd_sweep_stop(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    std::filesystem::create_directories(out_dir);
    write_resolved_config(cfg, out_dir);
    write_text(out_dir + "/sweep_stop.csv", sweep_stop_csv(sweep_stop(cfg, jobs)));
}

void cmd_spectrum(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_resolved_config(cfg, out_dir);
    const SpectrumTable table = spectrum_table(cfg);

    CsvWriter csv({"field", "level", "energy", "parity_flip", "parity_spatial"});
    for (const auto& r : table.rows)
        csv.add_row({CsvWriter::num(r[0]), CsvWriter::integer(static_cast<long>(r[1])),
                     CsvWriter::num(r[2]), CsvWriter::integer(static_cast<long>(r[3])),
                     CsvWriter::integer(static_cast<long>(r[4]))});
    csv.write_file(out_dir + "/spectrum.csv");

    CsvWriter gaps({"field", "coupled_gap"});
    for (size_t k = 0; k < table.gap.fields.size(); ++k)
        gaps.add_row({CsvWriter::num(table.gap.fields[k]),
                      CsvWriter::num(table.gap.coupled_gaps[k])});
    gaps.write_file(out_dir + "/gaps.csv");

    CsvWriter summary({"b_star", "gap_star", "parity_fallback"});
    summary.add_row({CsvWriter::num(table.gap.b_star), CsvWriter::num(table.gap.gap_star),
                     CsvWriter::integer(table.gap.used_parity_fallback ? 1 : 0)});
    summary.write_file(out_dir + "/gap_summary.csv");
}

void cmd_couplings(const ExperimentConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_resolved_config(cfg, out_dir);
    const CouplingsReport rep = couplings_report(cfg);

    if (rep.has_chain || rep.chain.positions.size() > 0) {
        CsvWriter pos({"ion", "position"});
        for (int i = 0; i < rep.chain.n_ions(); ++i)
            pos.add_row({CsvWriter::integer(i), CsvWriter::num(rep.chain.positions[i])});
        pos.write_file(out_dir + "/positions.csv");
    }
    if (rep.modes.n_modes() > 0) {
        CsvWriter modes({"mode", "frequency"});
        for (int nu = 0; nu < rep.modes.n_modes(); ++nu)
            modes.add_row({CsvWriter::integer(nu), CsvWriter::num(rep.modes.frequencies[nu])});
        modes.write_file(out_dir + "/modes.csv");

        CsvWriter vecs({"mode", "ion", "component"});
        for (int nu = 0; nu < rep.modes.n_modes(); ++nu)
            for (int i = 0; i < rep.modes.n_modes(); ++i)
                vecs.add_row({CsvWriter::integer(nu), CsvWriter::integer(i),
                              CsvWriter::num(rep.modes.eigenvectors(i, nu))});
        vecs.write_file(out_dir + "/mode_vectors.csv");
    }
    CsvWriter jij({"i", "j", "value"});
    for (int i = 0; i < rep.couplings.n(); ++i)
        for (int j = i + 1; j < rep.couplings.n(); ++j)
            jij.add_row({CsvWriter::integer(i), CsvWriter::integer(j),
                         CsvWriter::num(rep.couplings(i, j))});
    jij.write_file(out_dir + "/jij.csv");

    CsvWriter alpha({"alpha_fit"});
    alpha.add_row({CsvWriter::num(rep.alpha_fit)});
    alpha.write_file(out_dir + "/alpha.csv");
}

}  // namespace spinramp
