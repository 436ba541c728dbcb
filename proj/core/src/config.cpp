#include "spinramp/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace spinramp {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + text + "' for " + key);
    }
}

int parse_int(const std::string& key, const std::string& text) {
    try {
        size_t pos = 0;
        const int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + text + "' for " + key);
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& text,
                               bool angles = false) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(angles ? parse_angle(item) : parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_num(v[i]);
    }
    return out;
}

}  // namespace

double parse_angle(const std::string& text) {
    const std::string s = trim(text);
    const size_t pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigError("config: bad angle '" + text + "'");
        return v;
    }
    double factor = 1.0;
    const std::string pre = trim(s.substr(0, pi_pos));
    if (!pre.empty()) {
        if (pre.back() != '*') throw ConfigError("config: bad angle '" + text + "'");
        factor = std::stod(trim(pre.substr(0, pre.size() - 1)));
    }
    double divisor = 1.0;
    const std::string post = trim(s.substr(pi_pos + 2));
    if (!post.empty()) {
        if (post.front() != '/') throw ConfigError("config: bad angle '" + text + "'");
        divisor = std::stod(trim(post.substr(1)));
        if (divisor == 0.0) throw ConfigError("config: bad angle '" + text + "'");
    }
    return factor * std::numbers::pi / divisor;
}

ExperimentConfig default_config(ModelKind kind) {
    ExperimentConfig c;
    c.model_kind = kind;
    if (kind == ModelKind::Tfim) {
        c.thetas = {std::numbers::pi / 6, std::numbers::pi / 3, std::numbers::pi / 2};
        c.sweep_values = {0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0};
        c.sweep_tau_values = {0.2, 0.4, 0.6};
        for (double b = 0.3; b < 1.5 + 1e-9; b += 0.05) c.spectrum_fields.push_back(b);
    } else {
        c.n_sites = 1;
        c.coupling_source = "none";
        c.schedule_kind = ScheduleKind::Linear;
        c.b0 = -20.0;
        c.tau = 5.0;
        c.post_stop = PostStop::Hold;
        c.record_stride = 1;
        c.thetas = {std::numbers::pi / 6, std::numbers::pi / 3, std::numbers::pi / 2};
        c.sweep_values = {1.5, 3.25, 5.0, 9.0};
        c.sweep_tau_values = {1.5, 3.25, 5.0, 9.0};
        for (double b = -3.0; b < 3.0 + 1e-9; b += 0.25) c.spectrum_fields.push_back(b);
    }
    return c;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "model.kind") {
        if (v == "tfim") {
            cfg.model_kind = ModelKind::Tfim;
        } else if (v == "landau_zener" || v == "lz") {
            cfg.model_kind = ModelKind::LandauZener;
        } else {
            throw ConfigError("config: model.kind must be tfim or landau_zener, got '" + v + "'");
        }
    } else if (key == "model.n_sites") {
        cfg.n_sites = parse_int(key, v);
        if (cfg.n_sites < 1 || cfg.n_sites > 14)
            throw ConfigError("config: model.n_sites must be in [1, 14]");
    } else if (key == "model.coupling_source") {
        if (v != "phonon" && v != "power_law")
            throw ConfigError("config: model.coupling_source must be phonon or power_law");
        cfg.coupling_source = v;
    } else if (key == "model.mu") {
        cfg.mu = parse_double(key, v);
    } else if (key == "model.beta") {
        cfg.beta = parse_double(key, v);
    } else if (key == "model.alpha") {
        cfg.alpha = parse_double(key, v);
    } else if (key == "model.j_prefactor") {
        cfg.j_prefactor = parse_double(key, v);
    } else if (key == "model.j0") {
        cfg.j0 = parse_double(key, v);
    } else if (key == "model.j_sign") {
        cfg.j_sign = parse_int(key, v);
        if (cfg.j_sign != 1 && cfg.j_sign != -1)
            throw ConfigError("config: model.j_sign must be +1 or -1");
    } else if (key == "schedule.kind") {
        if (v == "linear") cfg.schedule_kind = ScheduleKind::Linear;
        else if (v == "exponential") cfg.schedule_kind = ScheduleKind::Exponential;
        else if (v == "constant") cfg.schedule_kind = ScheduleKind::Constant;
        else throw ConfigError("config: schedule.kind must be linear, exponential or constant");
    } else if (key == "schedule.b0") {
        cfg.b0 = parse_double(key, v);
    } else if (key == "schedule.tau") {
        cfg.tau = parse_double(key, v);
        if (cfg.tau <= 0.0) throw ConfigError("config: schedule.tau must be positive");
    } else if (key == "schedule.t_stop_factor") {
        cfg.t_stop_factor = parse_double(key, v);
    } else if (key == "schedule.b_stop") {
        cfg.b_stop_target = parse_double(key, v);
    } else if (key == "schedule.post_stop") {
        if (v == "hold") cfg.post_stop = PostStop::Hold;
        else if (v == "quench_to_zero" || v == "quench") cfg.post_stop = PostStop::QuenchToZero;
        else throw ConfigError("config: schedule.post_stop must be hold or quench_to_zero");
    } else if (key == "integrator.dt") {
        cfg.dt = parse_double(key, v);
        if (cfg.dt <= 0.0) throw ConfigError("config: integrator.dt must be positive");
    } else if (key == "integrator.tolerance") {
        cfg.solver_tolerance = parse_double(key, v);
    } else if (key == "integrator.record_stride") {
        cfg.record_stride = parse_int(key, v);
        if (cfg.record_stride < 1) throw ConfigError("config: record_stride must be >= 1");
    } else if (key == "integrator.t_meas") {
        cfg.t_meas = parse_double(key, v);
        if (cfg.t_meas < 0.0) throw ConfigError("config: integrator.t_meas must be >= 0");
    } else if (key == "observable.theta") {
        cfg.thetas = parse_list(key, v, /*angles=*/true);
        if (!std::is_sorted(cfg.thetas.begin(), cfg.thetas.end()))
            throw ConfigError("config: observable.theta must be ascending");
    } else if (key == "observable.method") {
        if (v == "first_extrema") cfg.amplitude_method = AmplitudeMethod::FirstExtrema;
        else if (v == "global_window") cfg.amplitude_method = AmplitudeMethod::GlobalWindow;
        else throw ConfigError("config: observable.method must be first_extrema or global_window");
    } else if (key == "sweep.parameter") {
        if (v != "tau" && v != "b_stop")
            throw ConfigError("config: sweep.parameter must be tau or b_stop");
        cfg.sweep_parameter = v;
    } else if (key == "sweep.values") {
        cfg.sweep_values = parse_list(key, v);
    } else if (key == "sweep.tau_values") {
        cfg.sweep_tau_values = parse_list(key, v);
    } else if (key == "spectrum.fields") {
        cfg.spectrum_fields = parse_list(key, v);
    } else if (key == "spectrum.levels") {
        cfg.spectrum_levels = parse_int(key, v);
        if (cfg.spectrum_levels < 1) throw ConfigError("config: spectrum.levels must be >= 1");
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

ExperimentConfig load_config(const std::string& path_or_empty,
                             const std::vector<std::string>& overrides) {
    // model.kind may appear anywhere; resolve it first so kind-dependent
    // defaults are in place before the remaining keys land on top.
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!path_or_empty.empty()) {
        std::ifstream in(path_or_empty);
        if (!in) throw ConfigError("config: cannot open '" + path_or_empty + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: line " + std::to_string(lineno) +
                                  " is not key = value");
            pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    for (const std::string& ov : overrides) {
        const size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: override '" + ov + "' is not key=value");
        pairs.emplace_back(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }

    ModelKind kind = ModelKind::Tfim;
    for (const auto& [k, v] : pairs)
        if (k == "model.kind") {
            ExperimentConfig probe;
            apply_override(probe, k, v);
            kind = probe.model_kind;
        }

    ExperimentConfig cfg = default_config(kind);
    for (const auto& [k, v] : pairs) apply_override(cfg, k, v);
    return cfg;
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    std::map<std::string, std::string> m;
    m["model.kind"] = model_kind == ModelKind::Tfim ? "tfim" : "landau_zener";
    m["model.n_sites"] = std::to_string(n_sites);
    m["model.coupling_source"] = coupling_source;
    m["model.mu"] = format_num(mu);
    m["model.beta"] = format_num(beta);
    m["model.alpha"] = format_num(alpha);
    m["model.j_prefactor"] = format_num(j_prefactor);
    m["model.j0"] = format_num(j0);
    m["model.j_sign"] = std::to_string(j_sign);
    m["schedule.kind"] = schedule_kind == ScheduleKind::Linear
                             ? "linear"
                             : (schedule_kind == ScheduleKind::Exponential ? "exponential"
                                                                           : "constant");
    m["schedule.b0"] = format_num(b0);
    m["schedule.tau"] = format_num(tau);
    m["schedule.t_stop_factor"] = format_num(t_stop_factor);
    m["schedule.b_stop"] = format_num(b_stop_target);
    m["schedule.post_stop"] = post_stop == PostStop::Hold ? "hold" : "quench_to_zero";
    m["integrator.dt"] = format_num(dt);
    m["integrator.tolerance"] = format_num(solver_tolerance);
    m["integrator.record_stride"] = std::to_string(record_stride);
    m["integrator.t_meas"] = format_num(t_meas);
    m["observable.theta"] = format_list(thetas);
    m["observable.method"] =
        amplitude_method == AmplitudeMethod::FirstExtrema ? "first_extrema" : "global_window";
    m["sweep.parameter"] = sweep_parameter;
    m["sweep.values"] = format_list(sweep_values);
    m["sweep.tau_values"] = format_list(sweep_tau_values);
    m["spectrum.fields"] = format_list(spectrum_fields);
    m["spectrum.levels"] = std::to_string(spectrum_levels);
    return m;
}

}  // namespace spinramp
