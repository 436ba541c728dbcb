#include "spinramp/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>

#include "spinramp/csv.hpp"
#include "spinramp/experiment.hpp"

namespace spinramp {

namespace {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Minimal self-contained SVG line plot.
std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<Series>& series) {
    const int width = 720, height = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (size_t k = 0; k < s.x.size(); ++k) {
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

    // Axes box and ticks.
    svg += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
           "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        svg += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" +
               fmt(px(xv)) + "\" y2=\"" + fmt(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(mt + ph + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(xv) + "</text>\n";
        svg += "<line x1=\"" + fmt(ml - 5) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(py(yv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(yv) + "</text>\n";
    }
    svg += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 12.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xlabel +
           "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 " + fmt(mt + ph / 2) + ")\">" + ylabel + "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string pts;
        for (size_t k = 0; k < s.x.size(); ++k) {
            pts += fmt(px(s.x[k]));
            pts += ",";
            pts += fmt(py(s.y[k]));
            pts += " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(colors[si % 8]) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = mt + 16 + 16 * static_cast<double>(si);
        svg += "<line x1=\"" + fmt(ml + pw - 150) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(ml + pw - 130) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" +
               std::string(colors[si % 8]) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(ml + pw - 125) + "\" y=\"" + fmt(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<std::pair<int, std::string>>& columns) {
    std::string gp;
    gp += "set datafile separator ','\n";
    gp += "set key outside\n";
    gp += "set title '" + title + "'\n";
    gp += "set xlabel '" + xlabel + "'\n";
    gp += "set ylabel '" + ylabel + "'\n";
    gp += "set terminal svg size 720,480\n";
    gp += "set output 'figure_gnuplot.svg'\n";
    gp += "plot ";
    for (size_t k = 0; k < columns.size(); ++k) {
        if (k) gp += ", \\\n     ";
        gp += "'" + csv_name + "' using 1:" + std::to_string(columns[k].first) +
              " with lines title '" + columns[k].second + "' skip 1";
    }
    gp += "\n";
    return gp;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("figures: cannot write '" + path + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void emit(const std::string& dir, const std::string& csv, const std::string& gp,
          const std::string& svg) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/data.csv", csv);
    write_file(dir + "/plot.gp", gp);
    write_file(dir + "/figure.svg", svg);
}

std::string theta_label(double theta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "theta=%.4g", theta);
    return buf;
}

// fig2: analytic two-level probability and oscillation amplitude vs phi.
void figure2(const std::string& dir) {
    std::vector<double> phi;
    for (int k = 0; k <= 200; ++k) phi.push_back(std::numbers::pi / 2 * k / 200.0);
    const LzCurves curves = lz_analytic_curves(phi, std::numbers::pi / 2);

    CsvWriter csv({"phi", "probability", "amplitude"});
    for (size_t k = 0; k < phi.size(); ++k)
        csv.add_row({CsvWriter::num(phi[k]), CsvWriter::num(curves.probability[k]),
                     CsvWriter::num(curves.amplitude[k])});

    Series p{"ground-state probability", phi, curves.probability};
    Series a{"oscillation amplitude", phi, curves.amplitude};
    emit(dir, csv.str(),
         gnuplot_script("data.csv", "Two-level amplitude ambiguity", "phi", "value",
                        {{2, "probability"}, {3, "amplitude"}}),
         render_svg("Two-level amplitude ambiguity", "phi", "value", {p, a}));
}

// fig4: two-level post-ramp signals for several tau and theta. The caption
// and body text of the reference disagree on the smallest angle (pi/6 vs
// pi/9); both are included.
void figure4(const std::string& dir, int jobs) {
    (void)jobs;  // four cheap 2x2 runs
    ExperimentConfig base = default_config(ModelKind::LandauZener);
    base.thetas = {std::numbers::pi / 9, std::numbers::pi / 6, std::numbers::pi / 3,
                   std::numbers::pi / 2};
    const std::vector<double> taus = base.sweep_values;

    std::vector<RunRecord> recs(taus.size());
    for (size_t i = 0; i < taus.size(); ++i) {
        ExperimentConfig c = base;
        c.tau = taus[i];
        recs[i] = run_experiment(c);
    }

    std::vector<Series> plot;
    for (size_t i = 0; i < taus.size(); ++i) {
        const RunRecord& rec = recs[i];
        std::vector<std::string> header = {"time"};
        for (const double th : base.thetas) header.push_back(theta_label(th));
        CsvWriter csv(header);
        std::vector<double> xs, ys;
        for (size_t k = 0; k < rec.times.size(); ++k) {
            if (rec.times[k] < rec.t_stop) continue;
            std::vector<std::string> row = {CsvWriter::num(rec.times[k] - rec.t_stop)};
            for (const double th : base.thetas) {
                char name[32];
                std::snprintf(name, sizeof(name), "theta_%.6g", th);
                row.push_back(CsvWriter::num(rec.series.at(name)[k]));
            }
            csv.add_row(std::move(row));
            xs.push_back(rec.times[k] - rec.t_stop);
            char name[32];
            std::snprintf(name, sizeof(name), "theta_%.6g", std::numbers::pi / 2);
            ys.push_back(rec.series.at(name)[k]);
        }
        char tau_name[32];
        std::snprintf(tau_name, sizeof(tau_name), "tau_%.4g", taus[i]);
        write_file(dir + "/" + tau_name + ".csv", csv.str());
        plot.push_back({std::string("tau=") + fmt(taus[i]), xs, ys});
    }
    std::filesystem::create_directories(dir);
    write_file(dir + "/plot.gp",
               gnuplot_script("tau_5.csv", "Two-level signal after the ramp", "t - t_stop",
                              "O(theta)", {{2, "theta=pi/9"}, {3, "theta=pi/6"},
                                           {4, "theta=pi/3"}, {5, "theta=pi/2"}}));
    write_file(dir + "/figure.svg",
               render_svg("Two-level signal after the ramp (theta=pi/2)", "t - t_stop",
                          "O(theta)", plot));
    write_file(dir + "/data.csv", "see tau_*.csv\n");
}

// Shared sweep-figure emitter: amplitude per theta plus the probability.
void write_sweep_figure(const std::string& dir, const ExperimentConfig& cfg,
                        const std::vector<SweepRow>& rows, const std::string& title) {
    CsvWriter csv({"tau", "theta", "amplitude", "p_ground"});
    for (const auto& r : rows)
        csv.add_row({CsvWriter::num(r.primary), CsvWriter::num(r.secondary),
                     CsvWriter::num(r.amplitude), CsvWriter::num(r.p_ground)});

    std::vector<Series> plot;
    const size_t n_theta = cfg.thetas.size();
    for (size_t j = 0; j < n_theta; ++j) {
        Series s;
        s.label = theta_label(cfg.thetas[j]);
        for (size_t i = j; i < rows.size(); i += n_theta) {
            s.x.push_back(rows[i].primary);
            s.y.push_back(rows[i].amplitude);
        }
        plot.push_back(std::move(s));
    }
    Series prob;
    prob.label = "p_ground";
    for (size_t i = 0; i < rows.size(); i += n_theta) {
        prob.x.push_back(rows[i].primary);
        prob.y.push_back(rows[i].p_ground);
    }
    plot.push_back(std::move(prob));

    emit(dir, csv.str(),
         gnuplot_script("data.csv", title, "tau", "value",
                        {{3, "amplitude"}, {4, "p_ground"}}),
         render_svg(title, "tau", "value", plot));
}

// fig5: two-level amplitude and probability vs tau for six thetas.
void figure5(const std::string& dir, int jobs) {
    ExperimentConfig cfg = default_config(ModelKind::LandauZener);
    cfg.thetas = {std::numbers::pi / 12, std::numbers::pi / 6, std::numbers::pi / 4,
                  std::numbers::pi / 3, 5 * std::numbers::pi / 12, std::numbers::pi / 2};
    cfg.sweep_values.clear();
    for (double tau = 0.5; tau <= 10.0 + 1e-9; tau += 0.5) cfg.sweep_values.push_back(tau);

    const std::vector<SweepRow> rows = sweep_tau(cfg, jobs);
    write_sweep_figure(dir, cfg, rows, "Two-level amplitude vs ramp rate");
}

// fig7: Ising-chain spectra and the coupled gap vs transverse field.
void figure7(const std::string& dir, const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_config("", overrides);
    cfg.spectrum_fields.clear();
    for (double b = 0.1; b <= 2.0 + 1e-9; b += 0.05) cfg.spectrum_fields.push_back(b);

    const SpectrumTable table = spectrum_table(cfg);
    CsvWriter csv({"field", "level", "energy", "parity_flip", "parity_spatial"});
    for (const auto& r : table.rows)
        csv.add_row({CsvWriter::num(r[0]), CsvWriter::integer(static_cast<long>(r[1])),
                     CsvWriter::num(r[2]), CsvWriter::integer(static_cast<long>(r[3])),
                     CsvWriter::integer(static_cast<long>(r[4]))});

    // Plot the lowest levels relative to the ground state plus the coupled gap.
    const int levels = cfg.spectrum_levels;
    std::vector<Series> plot(static_cast<size_t>(std::min(levels, 8)));
    for (auto& s : plot) s.label = "";
    for (size_t k = 0; k < table.rows.size(); ++k) {
        const int lvl = static_cast<int>(table.rows[k][1]);
        if (lvl >= static_cast<int>(plot.size())) continue;
        const double e0 = table.rows[k - static_cast<size_t>(lvl)][2];
        plot[static_cast<size_t>(lvl)].x.push_back(table.rows[k][0]);
        plot[static_cast<size_t>(lvl)].y.push_back(table.rows[k][2] - e0);
        plot[static_cast<size_t>(lvl)].label = "level " + std::to_string(lvl);
    }
    Series gap{"coupled gap", table.gap.fields, table.gap.coupled_gaps};
    plot.push_back(std::move(gap));

    emit(dir, csv.str(),
         gnuplot_script("data.csv", "Ising chain spectra", "B / J0", "E - E0",
                        {{3, "energy"}}),
         render_svg("Ising chain spectra (gap min at B=" + fmt(table.gap.b_star) + ")",
                    "B / J0", "E - E0", plot));
}

// fig8: Ising quench signals for tau = 0.2, 0.4, 0.6.
void figure8(const std::string& dir, const std::vector<std::string>& overrides) {
    ExperimentConfig base = load_config("", overrides);
    const std::vector<double> taus = {0.2, 0.4, 0.6};
    std::vector<Series> plot;
    for (const double tau : taus) {
        ExperimentConfig c = base;
        c.tau = tau;
        const RunRecord rec = run_experiment(c);
        std::vector<std::string> header = {"time"};
        for (const double th : base.thetas) header.push_back(theta_label(th));
        CsvWriter csv(header);
        std::vector<double> xs, ys;
        for (size_t k = 0; k < rec.times.size(); ++k) {
            if (rec.times[k] < rec.t_stop) continue;
            std::vector<std::string> row = {CsvWriter::num(rec.times[k] - rec.t_stop)};
            for (const double th : base.thetas) {
                char name[32];
                std::snprintf(name, sizeof(name), "theta_%.6g", th);
                row.push_back(CsvWriter::num(rec.series.at(name)[k]));
            }
            csv.add_row(std::move(row));
            xs.push_back(rec.times[k] - rec.t_stop);
            char name[32];
            std::snprintf(name, sizeof(name), "theta_%.6g", std::numbers::pi / 2);
            ys.push_back(rec.series.at(name)[k]);
        }
        char tau_name[32];
        std::snprintf(tau_name, sizeof(tau_name), "tau_%.4g", tau);
        std::filesystem::create_directories(dir);
        write_file(dir + "/" + tau_name + ".csv", csv.str());
        plot.push_back({std::string("tau=") + fmt(tau), xs, ys});
    }
    write_file(dir + "/plot.gp",
               gnuplot_script("tau_0.4.csv", "Ising quench signal", "t - t_stop", "O(theta)",
                              {{2, "theta=pi/6"}, {3, "theta=pi/3"}, {4, "theta=pi/2"}}));
    write_file(dir + "/figure.svg",
               render_svg("Ising quench signal (theta=pi/2)", "t - t_stop", "O(theta)", plot));
    write_file(dir + "/data.csv", "see tau_*.csv\n");
}

// fig9: Ising amplitude and probability vs tau (quench protocol).
void figure9(const std::string& dir, int jobs, const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_config("", overrides);
    const std::vector<SweepRow> rows = sweep_tau(cfg, jobs);
    write_sweep_figure(dir, cfg, rows, "Ising amplitude vs ramp time");
}

// fig10: Ising hold-protocol amplitude vs the held field.
void figure10(const std::string& dir, int jobs, const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_config("", overrides);
    cfg.post_stop = PostStop::Hold;
    cfg.sweep_parameter = "b_stop";
    cfg.sweep_values = {0.1, 0.25, 0.4, 0.55, 0.72, 0.9, 1.2, 1.6, 2.0};
    const std::vector<SweepRow> rows = sweep_stop(cfg, jobs);

    CsvWriter csv({"b_stop", "tau", "amplitude", "p_ground"});
    for (const auto& r : rows)
        csv.add_row({CsvWriter::num(r.primary), CsvWriter::num(r.secondary),
                     CsvWriter::num(r.amplitude), CsvWriter::num(r.p_ground)});

    std::vector<Series> plot;
    const size_t n_tau = cfg.sweep_tau_values.size();
    for (size_t j = 0; j < n_tau; ++j) {
        Series s;
        s.label = "tau=" + fmt(cfg.sweep_tau_values[j]);
        for (size_t i = j; i < rows.size(); i += n_tau) {
            s.x.push_back(rows[i].primary);
            s.y.push_back(rows[i].amplitude);
        }
        plot.push_back(std::move(s));
    }
    emit(dir, csv.str(),
         gnuplot_script("data.csv", "Hold-protocol amplitude", "B(t_stop) / J0", "amplitude",
                        {{3, "amplitude"}}),
         render_svg("Hold-protocol amplitude", "B(t_stop) / J0", "amplitude", plot));
}

}  // namespace

std::vector<FigureStatus> write_figures(const std::string& out_dir, int jobs,
                                        const std::vector<std::string>& overrides) {
    std::filesystem::create_directories(out_dir);
    std::vector<FigureStatus> manifest;

    auto attempt = [&](const std::string& name, const std::function<void()>& fn) {
        FigureStatus st;
        st.name = name;
        try {
            fn();
            st.ok = true;
        } catch (const std::exception& e) {
            st.error = e.what();
        }
        manifest.push_back(std::move(st));
    };

    attempt("fig2", [&] { figure2(out_dir + "/fig2"); });
    attempt("fig4", [&] { figure4(out_dir + "/fig4", jobs); });
    attempt("fig5", [&] { figure5(out_dir + "/fig5", jobs); });
    attempt("fig7", [&] { figure7(out_dir + "/fig7", overrides); });
    attempt("fig8", [&] { figure8(out_dir + "/fig8", overrides); });
    attempt("fig9", [&] { figure9(out_dir + "/fig9", jobs, overrides); });
    attempt("fig10", [&] { figure10(out_dir + "/fig10", jobs, overrides); });

    CsvWriter csv({"figure", "status", "error"});
    for (const auto& st : manifest)
        csv.add_row({st.name, st.ok ? "ok" : "failed", percent_encode(st.error)});
    csv.write_file(out_dir + "/manifest.csv");
    return manifest;
}

}  // namespace spinramp
