// Command-line driver: assembles configs into runs and sweeps, writes CSV
// and JSON artifacts, and renders the batch figure set.
//
// Exit codes: 0 success, 2 config error, 3 physics/consistency error,
// 4 solver error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinramp/experiment.hpp"
#include "spinramp/figures.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    int jobs = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (key = value lines)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--jobs", args.jobs, "Worker threads for sweep points")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--set", args.overrides, "Override a config key, e.g. schedule.tau=0.4");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const spinramp::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const spinramp::SolverError*>(&e)) return 4;
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinramp: diabatic ramp spectroscopy of driven spin models"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_tau_args, sweep_stop_args, spectrum_args, couplings_args,
        figures_args;

    CLI::App* cmd_run = app.add_subcommand("run", "Single ramp-and-measure run");
    add_common(cmd_run, run_args);
    CLI::App* cmd_sweep_tau =
        app.add_subcommand("sweep-tau", "Sweep the ramp time constant");
    add_common(cmd_sweep_tau, sweep_tau_args);
    CLI::App* cmd_sweep_stop =
        app.add_subcommand("sweep-stop", "Sweep the held stop field (hold protocol)");
    add_common(cmd_sweep_stop, sweep_stop_args);
    CLI::App* cmd_spectrum = app.add_subcommand("spectrum", "Eigenvalue table over a field grid");
    add_common(cmd_spectrum, spectrum_args);
    CLI::App* cmd_couplings =
        app.add_subcommand("couplings", "Chain positions, phonon modes and J_ij tables");
    add_common(cmd_couplings, couplings_args);
    CLI::App* cmd_figures = app.add_subcommand("figures", "Render the batch figure set");
    add_common(cmd_figures, figures_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const auto cfg = spinramp::load_config(run_args.config_path, run_args.overrides);
            spinramp::cmd_run(cfg, run_args.out_dir);
            std::printf("run: wrote %s/run_record.json\n", run_args.out_dir.c_str());
        } else if (cmd_sweep_tau->parsed()) {
            const auto cfg =
                spinramp::load_config(sweep_tau_args.config_path, sweep_tau_args.overrides);
            spinramp::cmd_sweep_tau(cfg, sweep_tau_args.out_dir, sweep_tau_args.jobs);
            std::printf("sweep-tau: wrote %s/sweep_tau.csv\n", sweep_tau_args.out_dir.c_str());
        } else if (cmd_sweep_stop->parsed()) {
            const auto cfg =
                spinramp::load_config(sweep_stop_args.config_path, sweep_stop_args.overrides);
            spinramp::cmd_sweep_stop(cfg, sweep_stop_args.out_dir, sweep_stop_args.jobs);
            std::printf("sweep-stop: wrote %s/sweep_stop.csv\n", sweep_stop_args.out_dir.c_str());
        } else if (cmd_spectrum->parsed()) {
            const auto cfg =
                spinramp::load_config(spectrum_args.config_path, spectrum_args.overrides);
            spinramp::cmd_spectrum(cfg, spectrum_args.out_dir);
            std::printf("spectrum: wrote %s/spectrum.csv\n", spectrum_args.out_dir.c_str());
        } else if (cmd_couplings->parsed()) {
            const auto cfg =
                spinramp::load_config(couplings_args.config_path, couplings_args.overrides);
            spinramp::cmd_couplings(cfg, couplings_args.out_dir);
            std::printf("couplings: wrote %s/jij.csv\n", couplings_args.out_dir.c_str());
        } else if (cmd_figures->parsed()) {
            const auto manifest = spinramp::write_figures(figures_args.out_dir,
                                                          figures_args.jobs,
                                                          figures_args.overrides);
            int failed = 0;
            for (const auto& st : manifest) {
                std::printf("%-6s %s%s%s\n", st.name.c_str(), st.ok ? "ok" : "FAILED",
                            st.ok ? "" : ": ", st.error.c_str());
                if (!st.ok) ++failed;
            }
            if (failed) return 3;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    }
    return 0;
}
