// scenario.hpp — named figure scenarios, strict INI configs, CSV + manifest output
//
// Config layout (every key optional, every resolved value echoed to manifest.json):
//
//   [scenario]  name
//   [params]    omega_c delta epsilon lambda diamagnetic n_max kappa gamma
//               drive_amplitude drive_frequency
//   [grid]      start stop step        (axis depends on the scenario)
//   [static]    initial_state n_tracked
//   [dynamics]  n_levels drive_mode spectral_weight qubit_bath resonance_cut
//               tolerance bandwidth settle_time_gamma
//   [output]    dir

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "usc/errors.hpp"
#include "usc/lindblad_dynamics.hpp"

namespace usc {

enum class Scenario { fig2a_spectrum, fig2b_rabi, fig2c_diamagnetic, fig3a_spectrum, fig3b_sweep, fig3c_tau, custom };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view text);
const std::vector<Scenario>& all_scenarios();
std::string_view describe(Scenario s);

// Bad config content. `line` is 0 when the problem is not tied to a line of the file.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& field, const std::string& message, int line = 0);
    const std::string& field() const { return field_; }
    const std::string& detail() const { return detail_; }
    int line() const { return line_; }

private:
    std::string field_;
    std::string detail_;
    int line_;
};

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> points() const;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::custom;
    SystemParams params;
    Grid grid;
    std::string axis;  // what the grid sweeps: lambda, epsilon or tau_gamma
    JcLabel initial_state = JcLabel::minus(2);
    LabelingOptions labeling;
    LindbladOptions dynamics;
    double tolerance = 1e-9;
    double bandwidth = 1e-2;
    double settle_time_gamma = 20.0;
    std::vector<double> tau_epsilons{0.0, 0.35};  // fig3c curves
    std::filesystem::path output_dir = "out";
    std::filesystem::path source;                 // config file, empty for pure defaults
};

// Defaults of a named scenario.
ScenarioConfig scenario_defaults(Scenario s);

// Command-line overrides applied on top of the file.
struct Overrides {
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::string> drive_mode;
    std::optional<std::string> spectral_weight;
    std::optional<int> n_max;
    std::optional<int> n_levels;
};

// Parses an INI file strictly: unknown sections or keys, malformed numbers and
// out-of-range values raise ConfigError with the offending line when known.
ScenarioConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
ScenarioConfig load_config_text(const std::string& text, const Overrides& overrides = {},
                                const std::filesystem::path& source = {});
void apply_overrides(ScenarioConfig& config, const Overrides& overrides);

// Cross-field checks shared by run and validate.
void check_config(const ScenarioConfig& config);

struct ValidationReport {
    std::size_t grid_points = 0;
    int hilbert_dim = 0;
    int superoperator_dim = 0;  // 0 for static scenarios
    double estimated_seconds = 0.0;
    std::vector<std::string> outputs;
};

ValidationReport validate_config(const ScenarioConfig& config);
void print_report(std::ostream& os, const ScenarioConfig& config, const ValidationReport& report);

struct RunResult {
    std::vector<std::filesystem::path> files;  // CSVs followed by manifest.json
};

RunResult run_scenario(const ScenarioConfig& config, unsigned threads);

// Fixed 12-significant-digit rendering used in every CSV.
std::string format_number(double value);

}  // namespace usc
