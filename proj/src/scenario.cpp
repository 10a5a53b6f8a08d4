#include "usc/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "usc/correlations_static.hpp"
#include "usc/errors.hpp"
#include "usc/parallel.hpp"

namespace usc {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

struct ScenarioInfo {
    Scenario id;
    std::string_view name;
    std::string_view summary;
};

constexpr ScenarioInfo kScenarios[] = {
    {Scenario::fig2a_spectrum, "fig2a_spectrum", "dressed energies vs lambda at resonance (Rabi)"},
    {Scenario::fig2b_rabi, "fig2b_rabi", "g2(0) of sigma_x and its derivatives from |2->, Rabi model"},
    {Scenario::fig2c_diamagnetic, "fig2c_diamagnetic", "same as fig2b with the diamagnetic term"},
    {Scenario::fig3a_spectrum, "fig3a_spectrum", "dressed energies vs flux bias at delta = 0.5, lambda = 0.2"},
    {Scenario::fig3b_sweep, "fig3b_sweep", "driven steady-state g2(0) of dI_theta and P(1+) vs flux bias"},
    {Scenario::fig3c_tau, "fig3c_tau", "driven g2(tau) at epsilon = 0 and 0.35"},
    {Scenario::custom, "custom", "static g2(0) table over a lambda grid with free parameters"},
};

bool is_static(Scenario s) {
    return s == Scenario::fig2b_rabi || s == Scenario::fig2c_diamagnetic || s == Scenario::custom;
}
bool is_spectrum(Scenario s) { return s == Scenario::fig2a_spectrum || s == Scenario::fig3a_spectrum; }
bool is_driven(Scenario s) { return s == Scenario::fig3b_sweep || s == Scenario::fig3c_tau; }

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string suggestion(std::string_view word, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = 3;  // only suggest close matches
    for (const auto& c : candidates) {
        const std::size_t d = edit_distance(word, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best.empty() ? std::string() : " (did you mean '" + best + "'?)";
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"scenario", {"name"}},
        {"params",
         {"omega_c", "delta", "epsilon", "lambda", "diamagnetic", "n_max", "kappa", "gamma", "drive_amplitude",
          "drive_frequency"}},
        {"grid", {"start", "stop", "step"}},
        {"static", {"initial_state", "n_tracked"}},
        {"dynamics",
         {"n_levels", "drive_mode", "spectral_weight", "qubit_bath", "resonance_cut", "tolerance", "bandwidth",
          "settle_time_gamma"}},
        {"output", {"dir"}},
    };
    return s;
}

// Keys a scenario accepts beyond [scenario], [grid] and [output].
std::set<std::string> accepted_keys(Scenario s) {
    std::set<std::string> keys = {"params.omega_c", "params.delta", "params.n_max"};
    switch (s) {
        case Scenario::fig2a_spectrum:
            keys.insert({"params.epsilon", "params.diamagnetic", "static.n_tracked"});
            break;
        case Scenario::fig2b_rabi:
        case Scenario::fig2c_diamagnetic:
        case Scenario::custom:
            keys.insert({"params.epsilon", "params.diamagnetic", "static.n_tracked", "static.initial_state"});
            break;
        case Scenario::fig3a_spectrum:
            keys.insert({"params.lambda", "params.diamagnetic", "static.n_tracked"});
            break;
        case Scenario::fig3b_sweep:
        case Scenario::fig3c_tau:
            keys.insert({"params.lambda", "params.diamagnetic", "params.kappa", "params.gamma",
                         "params.drive_amplitude", "params.drive_frequency", "static.n_tracked"});
            for (const auto& k : schema().at("dynamics")) keys.insert("dynamics." + k);
            if (s == Scenario::fig3c_tau) keys.erase("dynamics.settle_time_gamma");
            break;
    }
    return keys;
}

std::string axis_of(Scenario s) {
    switch (s) {
        case Scenario::fig3a_spectrum:
        case Scenario::fig3b_sweep:
            return "epsilon";
        case Scenario::fig3c_tau:
            return "tau_gamma";
        default:
            return "lambda";
    }
}

// Line numbers of "key = value" entries, found by a plain scan of the text.
std::map<std::string, int> key_lines(const std::string& text) {
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            lines.emplace(section, number);
            continue;
        }
        const auto eq = t.find('=');
        if (eq != std::string::npos) lines.emplace(section + "." + trim(t.substr(0, eq)), number);
    }
    return lines;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::map<std::string, int> lines) : tree_(tree), lines_(std::move(lines)) {}

    int line(const std::string& field) const {
        const auto it = lines_.find(field);
        return it == lines_.end() ? 0 : it->second;
    }

    std::optional<std::string> raw(const std::string& field) const {
        const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'));
        if (!v) return std::nullopt;
        return *v;
    }

    void number(const std::string& field, double& target) const {
        const auto v = raw(field);
        if (!v) return;
        std::size_t used = 0;
        try {
            target = std::stod(*v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v->size() || !std::isfinite(target)) {
            throw ConfigError(field, "expected a finite number, got '" + *v + "'", line(field));
        }
    }

    void integer(const std::string& field, int& target) const {
        const auto v = raw(field);
        if (!v) return;
        std::size_t used = 0;
        try {
            target = std::stoi(*v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v->size()) {
            throw ConfigError(field, "expected an integer, got '" + *v + "'", line(field));
        }
    }

    void boolean(const std::string& field, bool& target) const {
        const auto v = raw(field);
        if (!v) return;
        if (*v == "true" || *v == "1" || *v == "yes") {
            target = true;
        } else if (*v == "false" || *v == "0" || *v == "no") {
            target = false;
        } else {
            throw ConfigError(field, "expected true or false, got '" + *v + "'", line(field));
        }
    }

    template <class Parse, class T>
    void enumerated(const std::string& field, T& target, Parse parse) const {
        const auto v = raw(field);
        if (!v) return;
        try {
            target = parse(*v);
        } catch (const InvalidArgument& e) {
            throw ConfigError(field, e.what(), line(field));
        }
    }

private:
    const pt::ptree& tree_;
    std::map<std::string, int> lines_;
};

// Rethrows parameter validation failures as config errors on the matching [params] key.
void check_params(const SystemParams& p) {
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        std::string msg = e.what();
        std::string field = "params";
        const auto dot = msg.find('.');
        const auto colon = msg.find(':');
        if (msg.rfind("SystemParams.", 0) == 0 && colon != std::string::npos && dot < colon) {
            field = "params." + msg.substr(dot + 1, colon - dot - 1);
            msg = msg.substr(colon + 1);
            if (!msg.empty() && msg[0] == ' ') msg.erase(0, 1);
        }
        throw ConfigError(field, msg);
    }
}

}  // namespace

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : InvalidArgument(field + ": " + message + (line > 0 ? " (line " + std::to_string(line) + ")" : "")),
      field_(field),
      detail_(message),
      line_(line) {}

std::string_view to_string(Scenario s) {
    for (const auto& info : kScenarios) {
        if (info.id == s) return info.name;
    }
    return "unknown";
}

std::string_view describe(Scenario s) {
    for (const auto& info : kScenarios) {
        if (info.id == s) return info.summary;
    }
    return "";
}

Scenario parse_scenario(std::string_view text) {
    std::vector<std::string> names;
    for (const auto& info : kScenarios) {
        if (info.name == text) return info.id;
        names.emplace_back(info.name);
    }
    throw ConfigError("scenario.name", "unknown scenario '" + std::string(text) + "'" + suggestion(text, names));
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> list = [] {
        std::vector<Scenario> v;
        for (const auto& info : kScenarios) v.push_back(info.id);
        return v;
    }();
    return list;
}

std::vector<double> Grid::points() const {
    if (!(step > 0.0)) throw ConfigError("grid.step", "must be > 0");
    if (stop < start) throw ConfigError("grid.stop", "must be >= grid.start");
    const double span = (stop - start) / step;
    if (span > 1e6) throw ConfigError("grid.step", "grid would have more than 10^6 points");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

ScenarioConfig scenario_defaults(Scenario s) {
    ScenarioConfig c;
    c.scenario = s;
    c.axis = axis_of(s);
    c.output_dir = fs::path("out") / std::string(to_string(s));
    switch (s) {
        case Scenario::fig2a_spectrum:
            c.grid = {0.0, 1.0, 0.005};
            break;
        case Scenario::fig2b_rabi:
            c.grid = {0.005, 1.0, 0.005};
            break;
        case Scenario::fig2c_diamagnetic:
            c.params.diamagnetic = true;
            c.grid = {0.005, 1.0, 0.005};
            break;
        case Scenario::custom:
            c.grid = {0.0, 0.0, 0.01};
            break;
        case Scenario::fig3a_spectrum:
            c.params.delta = 0.5;
            c.params.lambda = 0.2;
            c.grid = {0.0, 0.5, 0.005};
            break;
        case Scenario::fig3b_sweep:
        case Scenario::fig3c_tau:
            c.params.delta = 0.5;
            c.params.lambda = 0.2;
            c.params.kappa = 5e-4;
            c.params.gamma = 5e-4;
            c.params.drive_amplitude = 0.25 * 5e-4;
            c.params.drive_frequency = 0.0;  // 0 = lock to the |0> <-> |1+> transition
            c.grid = s == Scenario::fig3b_sweep ? Grid{0.0, 0.5, 0.01} : Grid{0.0, 10.0, 0.05};
            break;
    }
    return c;
}

void apply_overrides(ScenarioConfig& config, const Overrides& o) {
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.n_max) config.params.n_max = *o.n_max;
    const bool driven = is_driven(config.scenario);
    auto driven_only = [&](const char* flag) {
        if (!driven) {
            throw ConfigError(flag, "only applies to driven scenarios (fig3b_sweep, fig3c_tau)");
        }
    };
    try {
        if (o.drive_mode) {
            driven_only("--drive-mode");
            config.dynamics.drive_mode = parse_drive_mode(*o.drive_mode);
        }
        if (o.spectral_weight) {
            driven_only("--spectral-weight");
            config.dynamics.spectral_weight = parse_spectral_weight(*o.spectral_weight);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(o.drive_mode ? "--drive-mode" : "--spectral-weight", e.what());
    }
    if (o.n_levels) {
        driven_only("--nlevels");
        config.dynamics.n_levels = *o.n_levels;
    }
}

ScenarioConfig load_config_text(const std::string& text, const Overrides& overrides, const fs::path& source) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", e.message(), static_cast<int>(e.line()));
    }
    const Reader reader(tree, key_lines(text));

    const auto name = reader.raw("scenario.name");
    if (!name) throw ConfigError("scenario.name", "required");
    Scenario scenario;
    try {
        scenario = parse_scenario(*name);
    } catch (const ConfigError& e) {
        throw ConfigError(e.field(), e.detail(), reader.line("scenario.name"));
    }
    ScenarioConfig c = scenario_defaults(scenario);
    c.source = source;

    std::vector<std::string> sections;
    for (const auto& [section, keys] : schema()) sections.push_back(section);
    const auto accepted = accepted_keys(scenario);
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            throw ConfigError(section, "unknown section" + suggestion(section, sections), reader.line(section));
        }
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(section, "expected a [section], found a top-level key", reader.line("." + section));
        }
        for (const auto& [key, value] : body) {
            const std::string field = section + "." + key;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                throw ConfigError(field, "unknown key" + suggestion(key, it->second), reader.line(field));
            }
            const bool always = section == "scenario" || section == "grid" || section == "output";
            if (!always && !accepted.count(field)) {
                std::string why = "not used by scenario " + std::string(to_string(scenario));
                if (key == c.axis) why += " (it is the sweep axis; use [grid])";
                throw ConfigError(field, why, reader.line(field));
            }
        }
    }

    SystemParams& p = c.params;
    reader.number("params.omega_c", p.omega_c);
    reader.number("params.delta", p.delta);
    reader.number("params.epsilon", p.epsilon);
    reader.number("params.lambda", p.lambda);
    reader.boolean("params.diamagnetic", p.diamagnetic);
    reader.integer("params.n_max", p.n_max);
    reader.number("params.kappa", p.kappa);
    reader.number("params.gamma", p.gamma);
    reader.number("params.drive_amplitude", p.drive_amplitude);
    reader.number("params.drive_frequency", p.drive_frequency);

    reader.number("grid.start", c.grid.start);
    reader.number("grid.stop", c.grid.stop);
    reader.number("grid.step", c.grid.step);
    if (!(c.grid.step > 0.0)) throw ConfigError("grid.step", "must be > 0", reader.line("grid.step"));
    if (c.grid.stop < c.grid.start) throw ConfigError("grid.stop", "must be >= grid.start", reader.line("grid.stop"));

    reader.enumerated("static.initial_state", c.initial_state, [](const std::string& v) { return JcLabel::parse(v); });
    reader.integer("static.n_tracked", c.labeling.n_tracked);

    reader.integer("dynamics.n_levels", c.dynamics.n_levels);
    reader.enumerated("dynamics.drive_mode", c.dynamics.drive_mode,
                      [](const std::string& v) { return parse_drive_mode(v); });
    reader.enumerated("dynamics.spectral_weight", c.dynamics.spectral_weight,
                      [](const std::string& v) { return parse_spectral_weight(v); });
    reader.enumerated("dynamics.qubit_bath", c.dynamics.qubit_bath,
                      [](const std::string& v) { return parse_qubit_bath(v); });
    reader.number("dynamics.resonance_cut", c.dynamics.resonance_cut);
    reader.number("dynamics.tolerance", c.tolerance);
    reader.number("dynamics.bandwidth", c.bandwidth);
    reader.number("dynamics.settle_time_gamma", c.settle_time_gamma);

    if (const auto dir = reader.raw("output.dir")) {
        if (dir->empty()) throw ConfigError("output.dir", "must not be empty", reader.line("output.dir"));
        c.output_dir = *dir;
    }

    apply_overrides(c, overrides);
    check_config(c);
    return c;
}

ScenarioConfig load_config(const fs::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return load_config_text(text.str(), overrides, path);
}

void check_config(const ScenarioConfig& c) {
    check_params(c.params);
    const auto points = c.grid.points();
    if (c.params.n_max < kMinFockCutoff) {
        throw ConfigError("params.n_max", "must be >= " + std::to_string(kMinFockCutoff));
    }
    const int dim = c.params.dim();
    if (c.labeling.n_tracked < 1 || c.labeling.n_tracked > dim) {
        throw ConfigError("static.n_tracked", "must be in [1, " + std::to_string(dim) + "]");
    }
    if (c.axis == "lambda" && c.grid.start < 0.0) throw ConfigError("grid.start", "coupling must be >= 0");
    if (c.axis == "tau_gamma" && c.grid.start < 0.0) throw ConfigError("grid.start", "delay must be >= 0");
    if (is_static(c.scenario) && c.initial_state.rank() >= c.labeling.n_tracked) {
        throw ConfigError("static.initial_state",
                          "state " + c.initial_state.str() + " is not among the n_tracked = " +
                              std::to_string(c.labeling.n_tracked) + " labeled states");
    }
    if (is_driven(c.scenario)) {
        if (c.labeling.n_tracked < 3) throw ConfigError("static.n_tracked", "driven scenarios track at least 0, 1-, 1+");
        if (c.dynamics.n_levels < 3 || c.dynamics.n_levels > dim) {
            throw ConfigError("dynamics.n_levels", "must be in [3, " + std::to_string(dim) + "]");
        }
        if (!(c.dynamics.resonance_cut >= 0.0)) throw ConfigError("dynamics.resonance_cut", "must be >= 0");
        if (!(c.tolerance > 0.0 && c.tolerance < 1e-2)) throw ConfigError("dynamics.tolerance", "must be in (0, 1e-2)");
        if (!(c.bandwidth > 0.0)) throw ConfigError("dynamics.bandwidth", "must be > 0");
        if (c.params.kappa <= 0.0 && c.params.gamma <= 0.0) {
            throw ConfigError("params.gamma", "driven scenarios need kappa > 0 or gamma > 0");
        }
        if (c.scenario == Scenario::fig3c_tau) {
            if (c.dynamics.drive_mode != DriveMode::dressed_rwa) {
                throw ConfigError("dynamics.drive_mode", "fig3c_tau needs a time-independent generator (dressed_rwa)");
            }
            if (c.params.gamma <= 0.0) throw ConfigError("params.gamma", "fig3c_tau measures delay in units of 1/gamma");
        } else if (c.dynamics.drive_mode == DriveMode::full_time) {
            if (!(c.settle_time_gamma > 0.0)) throw ConfigError("dynamics.settle_time_gamma", "must be > 0");
            if (c.params.gamma <= 0.0) throw ConfigError("params.gamma", "settle time is measured in units of 1/gamma");
        }
    }
}

namespace {

// Rough per-operation costs on one core, in seconds.
constexpr double kDiagCost = 3e-9;     // times dim^3, one labeled continuation step
constexpr double kDenseCost = 1e-9;    // times N^3 for LU on the superoperator
constexpr double kEigenCost = 4e-8;    // times N^3, complex eigensolver

std::vector<std::string> output_names(Scenario s) {
    switch (s) {
        case Scenario::fig3c_tau:
            return {"fig3c_tau.csv", "fig3c_tau_raw.csv", "manifest.json"};
        case Scenario::custom:
            return {"custom_g2.csv", "manifest.json"};
        default:
            return {std::string(to_string(s)) + ".csv", "manifest.json"};
    }
}

}  // namespace

ValidationReport validate_config(const ScenarioConfig& c) {
    check_config(c);
    ValidationReport r;
    const auto points = c.grid.points();
    r.grid_points = points.size();
    r.hilbert_dim = c.params.dim();
    r.outputs = output_names(c.scenario);
    const double d3 = std::pow(static_cast<double>(r.hilbert_dim), 3);
    const double step = c.labeling.max_step;
    double path_steps = 0.0;
    if (c.axis == "lambda") {
        path_steps = c.grid.stop / step + static_cast<double>(points.size());
    } else {
        path_steps = c.params.lambda / step + std::abs(c.grid.stop) / step + static_cast<double>(points.size());
        if (c.scenario == Scenario::fig3c_tau) {
            path_steps = 0.0;
            for (double e : c.tau_epsilons) path_steps += (c.params.lambda + e) / step + 1.0;
        }
    }
    r.estimated_seconds = path_steps * kDiagCost * d3;
    if (is_driven(c.scenario)) {
        r.superoperator_dim = c.dynamics.n_levels * c.dynamics.n_levels;
        const double n3 = std::pow(static_cast<double>(r.superoperator_dim), 3);
        if (c.scenario == Scenario::fig3b_sweep) {
            if (c.dynamics.drive_mode == DriveMode::full_time) {
                // RK steps over the settle time at ~30 steps per drive period, each a few n^3 products.
                const double t = c.settle_time_gamma / c.params.gamma;
                const double nl3 = std::pow(static_cast<double>(c.dynamics.n_levels), 3);
                r.estimated_seconds += points.size() * t * 30.0 / (2.0 * std::numbers::pi) * 6.0 * 8.0 * nl3 * 1e-9;
            } else {
                r.estimated_seconds += points.size() * 3.0 * kDenseCost * n3;
            }
        } else {
            r.estimated_seconds += c.tau_epsilons.size() * (3.0 * kDenseCost + 2.0 * kEigenCost) * n3;
        }
    }
    return r;
}

void print_report(std::ostream& os, const ScenarioConfig& c, const ValidationReport& r) {
    os << "scenario:        " << to_string(c.scenario) << "\n";
    os << std::left << std::setw(17) << ("grid (" + c.axis + "):") << r.grid_points << " points, " << format_number(c.grid.start) << " .. "
       << format_number(c.grid.stop) << " step " << format_number(c.grid.step) << "\n";
    os << "hilbert dim:     " << r.hilbert_dim << " (n_max = " << c.params.n_max << ")\n";
    if (r.superoperator_dim > 0) {
        os << "superoperator:   " << r.superoperator_dim << " x " << r.superoperator_dim
           << " (n_levels = " << c.dynamics.n_levels << ", " << to_string(c.dynamics.drive_mode) << ", "
           << to_string(c.dynamics.spectral_weight) << ")\n";
    }
    os << "estimated time:  ~" << std::setprecision(2) << std::max(r.estimated_seconds, 0.01)
       << " s on one core\n";
    os << "output dir:      " << c.output_dir.string() << "\n";
    os << "files:          ";
    for (const auto& f : r.outputs) os << " " << f;
    os << "\n";
}

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drops the sign of -0
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

namespace {

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& columns) : path_(path), out_(path) {
        if (!out_) throw InvalidArgument("cannot write '" + path.string() + "'");
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
        ++rows_;
    }

    std::size_t rows() const { return rows_; }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::ofstream out_;
    std::size_t rows_ = 0;
};

nlohmann::ordered_json params_json(const SystemParams& p) {
    nlohmann::ordered_json j;
    j["omega_c"] = p.omega_c;
    j["delta"] = p.delta;
    j["epsilon"] = p.epsilon;
    j["lambda"] = p.lambda;
    j["diamagnetic"] = p.diamagnetic;
    j["n_max"] = p.n_max;
    j["kappa"] = p.kappa;
    j["gamma"] = p.gamma;
    j["drive_amplitude"] = p.drive_amplitude;
    j["drive_frequency"] = p.drive_frequency;
    return j;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_spectrum(const ScenarioConfig& c, CsvWriter& csv) {
    const auto grid = c.grid.points();
    const SweepAxis axis = c.axis == "lambda" ? SweepAxis::lambda : SweepAxis::epsilon;
    const auto bases = sweep_labeled(c.params, axis, grid, c.labeling);
    for (std::size_t g = 0; g < bases.size(); ++g) {
        const auto& b = bases[g];
        const int shown = std::min(c.labeling.n_tracked, b.dim());
        for (int k = 0; k < shown; ++k) {
            csv.row({format_number(grid[g]), std::to_string(k), b.labels[k] ? b.labels[k]->str() : "",
                     format_number(b.energies(k) - b.energies(0)),
                     b.parities[k] ? std::to_string(*b.parities[k]) : ""});
        }
    }
}

void write_static(const ScenarioConfig& c, CsvWriter& csv, unsigned threads) {
    const auto grid = c.grid.points();
    const std::vector<OperatorRequest> ops = {
        {EmissionKind::sigma_x, 0}, {EmissionKind::sigma_x, 1}, {EmissionKind::sigma_x, 2}};
    const G2Table table = sweep_g2_zero(c.params, grid, ops, c.initial_state, c.labeling, threads);
    for (std::size_t r = 0; r < table.x.size(); ++r) {
        csv.row({format_number(table.x[r]), format_optional(table.values[r][0]), format_optional(table.values[r][1]),
                 format_optional(table.values[r][2])});
    }
}

std::vector<DriveSweepRow> full_time_sweep(const ScenarioConfig& c, const std::vector<double>& grid,
                                           unsigned threads) {
    const auto bases = sweep_labeled(c.params, SweepAxis::epsilon, grid, c.labeling);
    std::vector<DriveSweepRow> rows(bases.size());
    EvolveOptions ev;
    ev.tolerance = c.tolerance;
    parallel_for(bases.size(), threads, [&](std::size_t i) {
        const auto& b = bases[i];
        SystemParams p = b.params;
        const int upper = b.index_of(JcLabel::plus(1));
        if (!(p.drive_frequency > 0.0)) p.drive_frequency = b.energies(upper) - b.energies(b.index_of(JcLabel::ground()));
        const auto gen = build_liouvillian(b, p, c.dynamics);
        Matrix rho0 = Matrix::Zero(gen.dim, gen.dim);
        rho0(0, 0) = 1.0;
        const auto avg = period_averaged_state(gen, rho0, c.settle_time_gamma / p.gamma, 64, ev);
        const auto emission = positive_frequency(build_emission_operator(p, EmissionKind::i_theta), b, 1)
                                  .truncated(c.dynamics.n_levels);
        rows[i] = {grid[i], g2_zero_steady(avg.matrix, emission), avg.population(upper), p.drive_frequency};
    });
    return rows;
}

void write_drive_sweep(const ScenarioConfig& c, CsvWriter& csv, unsigned threads) {
    const auto grid = c.grid.points();
    const auto rows = c.dynamics.drive_mode == DriveMode::full_time
                          ? full_time_sweep(c, grid, threads)
                          : sweep_g2_drive(c.params, grid, c.dynamics, c.labeling, threads);
    for (const auto& r : rows) {
        csv.row({format_number(r.epsilon), format_optional(r.g2_zero), format_number(r.pop_1plus),
                 format_number(r.omega_d)});
    }
}

void write_tau(const ScenarioConfig& c, CsvWriter& averaged, CsvWriter& raw, nlohmann::ordered_json& extra,
               unsigned threads) {
    const auto tau_gamma = c.grid.points();
    std::vector<double> tau(tau_gamma.size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = tau_gamma[i] / c.params.gamma;
    const std::size_t curves = c.tau_epsilons.size();
    std::vector<CorrelationSeries> avg(curves), reg(curves);
    std::vector<double> omega_d(curves);
    EvolveOptions ev;
    ev.tolerance = c.tolerance;
    parallel_for(curves, threads, [&](std::size_t k) {
        SystemParams p = c.params;
        p.epsilon = c.tau_epsilons[k];
        const auto basis = diagonalize_labeled(p, c.labeling);
        const auto point = solve_driven_point(basis, p, c.dynamics);
        omega_d[k] = point.params.drive_frequency;
        avg[k] = g2_tau_averaged(point.generator, point.steady, point.emission, tau, c.bandwidth);
        reg[k] = g2_tau(point.generator, point.steady, point.emission, tau, ev);
    });
    for (std::size_t i = 0; i < tau.size(); ++i) {
        std::vector<std::string> a{format_number(tau_gamma[i])};
        std::vector<std::string> r{format_number(tau_gamma[i])};
        for (std::size_t k = 0; k < curves; ++k) {
            a.push_back(avg[k].defined ? format_number(avg[k].values[i]) : "");
            r.push_back(reg[k].defined ? format_number(reg[k].values[i]) : "");
        }
        averaged.row(a);
        raw.row(r);
    }
    auto& curves_json = extra["curves"];
    for (std::size_t k = 0; k < curves; ++k) {
        nlohmann::ordered_json j;
        j["epsilon"] = c.tau_epsilons[k];
        j["omega_d"] = omega_d[k];
        j["normalization"] = avg[k].normalization;
        j["defined"] = avg[k].defined;
        j["clipped_negatives_averaged"] = avg[k].clipped_negatives;
        j["clipped_negatives_raw"] = reg[k].clipped_negatives;
        curves_json.push_back(j);
    }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& c, unsigned threads) {
    check_config(c);
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) throw InvalidArgument("output.dir: cannot create '" + c.output_dir.string() + "': " + ec.message());

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    RunResult result;
    auto record = [&](const CsvWriter& w, const std::vector<std::string>& columns, const std::string& content) {
        nlohmann::ordered_json f;
        f["name"] = w.path().filename().string();
        f["columns"] = columns;
        f["rows"] = w.rows();
        f["content"] = content;
        files.push_back(f);
        result.files.push_back(w.path());
    };

    const auto names = output_names(c.scenario);
    if (is_spectrum(c.scenario)) {
        const std::vector<std::string> cols = {"sweep_value", "state_index", "label", "energy", "parity"};
        CsvWriter csv(c.output_dir / names[0], cols);
        write_spectrum(c, csv);
        record(csv, cols, "dressed energies relative to the ground state, lowest n_tracked states per sweep value");
    } else if (is_static(c.scenario)) {
        const std::vector<std::string> cols = {"lambda", "g2_sigma_x", "g2_d_sigma_x", "g2_dd_sigma_x"};
        CsvWriter csv(c.output_dir / names[0], cols);
        write_static(c, csv, threads);
        record(csv, cols, "zero-delay g2 from state " + c.initial_state.str() + "; empty cell = dark state");
    } else if (c.scenario == Scenario::fig3b_sweep) {
        const std::vector<std::string> cols = {"epsilon", "g2_zero", "pop_1plus", "omega_d"};
        CsvWriter csv(c.output_dir / names[0], cols);
        write_drive_sweep(c, csv, threads);
        record(csv, cols, "steady-state g2(0) of the first-derivative I_theta emission; empty cell = dark state");
    } else {
        const std::vector<std::string> cols = {"tau_gamma", "g2_eps0", "g2_eps035"};
        CsvWriter averaged(c.output_dir / names[0], cols);
        CsvWriter raw(c.output_dir / names[1], cols);
        write_tau(c, averaged, raw, extra, threads);
        record(averaged, cols, "g2(tau) keeping Liouvillian modes with |Im| <= bandwidth (beat-averaged)");
        record(raw, cols, "g2(tau) by direct regression, including fast beats between emission lines");
    }

    nlohmann::ordered_json m;
    m["scenario"] = std::string(to_string(c.scenario));
    m["config"] = c.source.string();
    m["axis"] = c.axis;
    m["grid"] = {{"start", c.grid.start}, {"stop", c.grid.stop}, {"step", c.grid.step},
                 {"points", c.grid.points().size()}};
    m["params"] = params_json(c.params);
    m["labeling"] = {{"n_tracked", c.labeling.n_tracked},
                     {"seed_lambda", c.labeling.seed_lambda},
                     {"max_step", c.labeling.max_step},
                     {"ambiguity_tol", c.labeling.ambiguity_tol},
                     {"degeneracy_tol", c.labeling.degeneracy_tol}};
    if (is_static(c.scenario)) {
        m["static"] = {{"initial_state", c.initial_state.str()},
                       {"allowed_transition_rel", kAllowedTransitionRel},
                       {"dark_denominator", kDarkDenominator}};
    }
    if (is_driven(c.scenario)) {
        nlohmann::ordered_json d;
        d["n_levels"] = c.dynamics.n_levels;
        d["drive_mode"] = std::string(to_string(c.dynamics.drive_mode));
        d["spectral_weight"] = std::string(to_string(c.dynamics.spectral_weight));
        d["qubit_bath"] = std::string(to_string(c.dynamics.qubit_bath));
        d["resonance_cut"] = c.dynamics.resonance_cut;
        d["tolerance"] = c.tolerance;
        d["drive_frequency_rule"] = c.params.drive_frequency > 0.0 ? "fixed" : "locked to E(1+) - E(0)";
        d["emission"] = "I_theta, derivative order 1";
        if (c.scenario == Scenario::fig3c_tau) {
            d["bandwidth"] = c.bandwidth;
            d["tau_epsilons"] = c.tau_epsilons;
        } else if (c.dynamics.drive_mode == DriveMode::full_time) {
            d["settle_time_gamma"] = c.settle_time_gamma;
            d["period_samples"] = 64;
        }
        m["dynamics"] = d;
    }
    if (!extra.empty()) m["results"] = extra;
    m["files"] = files;
    m["threads"] = threads;
    m["version"] = "0.1.0";
    m["generated_at"] = utc_now();

    const fs::path manifest = c.output_dir / "manifest.json";
    std::ofstream out(manifest);
    if (!out) throw InvalidArgument("cannot write '" + manifest.string() + "'");
    out << m.dump(2) << "\n";
    result.files.push_back(manifest);
    return result;
}

}  // namespace usc
