// photonstat.cpp — command-line scenario runner

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "usc/errors.hpp"
#include "usc/parallel.hpp"
#include "usc/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string module_of(const usc::NumericalError& e) {
    if (dynamic_cast<const usc::LabelAmbiguityError*>(&e) || dynamic_cast<const usc::NoCrossingError*>(&e)) {
        return "dressed_spectrum";
    }
    if (dynamic_cast<const usc::DegenerateKernelError*>(&e) || dynamic_cast<const usc::IntegrationError*>(&e)) {
        return "lindblad_dynamics";
    }
    if (dynamic_cast<const usc::SingularSystemError*>(&e)) return "operator_algebra";
    return "numerics";
}

struct Selection {
    std::string scenario;
    std::string config;
    usc::Overrides overrides;
    std::string out;
    std::string drive_mode;
    std::string spectral_weight;
    int n_max = 0;
    int n_levels = 0;
};

void add_common(CLI::App* cmd, Selection& s) {
    cmd->add_option("scenario", s.scenario, "scenario name (defaults only; use --config for overrides)");
    cmd->add_option("--config", s.config, "INI config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", s.out, "output directory (overrides [output] dir)");
    cmd->add_option("--drive-mode", s.drive_mode, "dressed_rwa or full_time");
    cmd->add_option("--spectral-weight", s.spectral_weight, "ohmic or flat");
    cmd->add_option("--nmax", s.n_max, "Fock cutoff")->check(CLI::PositiveNumber);
    cmd->add_option("--nlevels", s.n_levels, "dressed levels kept for dynamics")->check(CLI::PositiveNumber);
}

usc::ScenarioConfig resolve(Selection& s) {
    usc::Overrides& o = s.overrides;
    if (!s.out.empty()) o.output_dir = s.out;
    if (!s.drive_mode.empty()) o.drive_mode = s.drive_mode;
    if (!s.spectral_weight.empty()) o.spectral_weight = s.spectral_weight;
    if (s.n_max > 0) o.n_max = s.n_max;
    if (s.n_levels > 0) o.n_levels = s.n_levels;

    if (!s.config.empty()) {
        auto config = usc::load_config(s.config, o);
        if (!s.scenario.empty() && usc::parse_scenario(s.scenario) != config.scenario) {
            throw usc::ConfigError("scenario", "'" + s.scenario + "' disagrees with the config file ('" +
                                                   std::string(usc::to_string(config.scenario)) + "')");
        }
        return config;
    }
    if (s.scenario.empty()) throw usc::ConfigError("scenario", "give a scenario name or --config PATH");
    auto config = usc::scenario_defaults(usc::parse_scenario(s.scenario));
    usc::apply_overrides(config, o);
    usc::check_config(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon statistics of a qubit in ultrastrong coupling with a resonator"};
    app.require_subcommand(1);
    unsigned threads = usc::default_thread_count();
    app.add_option("--threads", threads, "worker threads for sweep points")->check(CLI::PositiveNumber);

    Selection run_sel;
    Selection val_sel;
    auto* run = app.add_subcommand("run", "run a scenario and write CSV files plus manifest.json");
    auto* validate = app.add_subcommand("validate", "check a config and estimate its cost without computing");
    auto* list = app.add_subcommand("list-scenarios", "print the available scenarios");
    add_common(run, run_sel);
    add_common(validate, val_sel);
    run->add_option("--threads", threads, "worker threads for sweep points")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (list->parsed()) {
            for (auto s : usc::all_scenarios()) {
                std::cout << std::left << std::setw(20) << usc::to_string(s) << usc::describe(s) << "\n";
            }
            return 0;
        }
        if (validate->parsed()) {
            const auto config = resolve(val_sel);
            usc::print_report(std::cout, config, usc::validate_config(config));
            std::cout << "config OK\n";
            return 0;
        }
        const auto config = resolve(run_sel);
        const auto result = usc::run_scenario(config, threads);
        for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
        return 0;
    } catch (const usc::NumericalError& e) {
        std::cerr << "error [" << module_of(e) << "]: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const usc::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
