#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vms/harness.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;

int emit(const std::vector<vms::RunResult>& results, const std::string& out) {
    for (const auto& r : results) {
        for (const auto& a : r.artifacts) {
            a.write(out);
            std::cout << (std::filesystem::path(out) / a.filename).string() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral VMS stabilized FEM for 1D advection-diffusion(-reaction): figure and convergence presets"};
    app.require_subcommand(1);

    std::string preset_name, config_path, out_dir = ".", show_name;
    auto* preset = app.add_subcommand("preset", "run a named preset");
    preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
    preset->add_option("--out", out_dir, "output directory");

    auto* run = app.add_subcommand("run", "run a key = value config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* list = app.add_subcommand("list-presets", "list preset names");
    auto* show = app.add_subcommand("show-preset", "print a preset as config text");
    show->add_option("name", show_name, "preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (*list) {
            for (const auto& n : vms::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*show) {
            std::cout << vms::serialize(vms::preset_configs(show_name));
            return 0;
        }
        if (*preset) return emit(vms::run_preset(preset_name), out_dir);
        if (*run) return emit(vms::run_config(config_path), out_dir);
    } catch (const vms::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const vms::ConfigValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const vms::UnknownPreset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const vms::StepFailure& e) {
        std::cerr << "numeric failure at " << e.what() << "\n";
        return exit_numeric;
    } catch (const vms::SingularPivotError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_usage;
}
