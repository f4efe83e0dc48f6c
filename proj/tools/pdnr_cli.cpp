// Command-line front end: evolve / wigner / semiclassical / classify /
// preset-list over the run-configuration format.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdnr/config.hpp"
#include "pdnr/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = "pdnr_out";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool golden = false;
    bool strobe = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "run configuration file (key = value lines)");
    sub->add_option("--preset", args.preset, "named preset (see preset-list)");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    sub->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--golden", args.golden, "17-significant-digit output for golden tests");
}

pdnr::RunConfig resolve_config(const CommonArgs& args) {
    if (args.config_path.empty() && args.preset.empty())
        throw pdnr::config_error("need --config or --preset");
    if (!args.config_path.empty() && !args.preset.empty())
        throw pdnr::config_error("--config and --preset are mutually exclusive");
    if (!args.preset.empty()) return pdnr::make_preset(args.preset);
    return pdnr::load_config(args.config_path);
}

pdnr::RunFlags resolve_flags(const CommonArgs& args) {
    pdnr::RunFlags flags;
    flags.out_dir = args.out_dir;
    flags.golden = args.golden;
    flags.json_format = args.format == "json";
    flags.strobe = args.strobe;
    if (args.seed_set) flags.seed_override = args.seed;
    return flags;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator for a pulse-driven parametrically driven Kerr resonator"};
    app.require_subcommand(1);

    CommonArgs evolve_args, wigner_args, semi_args, classify_args;

    CLI::App* evolve = app.add_subcommand("evolve", "time series of the mean excitation number");
    add_common(evolve, evolve_args);
    CLI::App* wigner = app.add_subcommand("wigner", "phase-space snapshot at a chosen instant");
    add_common(wigner, wigner_args);
    CLI::App* semi = app.add_subcommand("semiclassical", "mean-field steady states / strobe map");
    add_common(semi, semi_args);
    semi->add_flag("--strobe", semi_args.strobe, "emit the stroboscopic point cloud");
    CLI::App* classify = app.add_subcommand("classify", "regime label for the configuration");
    add_common(classify, classify_args);
    CLI::App* plist = app.add_subcommand("preset-list", "list the built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plist->parsed()) {
            for (const std::string& name : pdnr::preset_names()) {
                const pdnr::RunConfig c = pdnr::make_preset(name);
                std::cout << name << ": delta=" << c.delta << " chi=" << c.chi
                          << " intensity=" << c.intensity << " T=" << c.pulse_width
                          << " tau=" << c.pulse_separation << " dim=" << c.dim
                          << " instant=" << pdnr::instant_name(c.instant) << "\n";
            }
            return 0;
        }
        if (evolve->parsed()) {
            pdnr::cmd_evolve(resolve_config(evolve_args), resolve_flags(evolve_args));
            return 0;
        }
        if (wigner->parsed()) {
            pdnr::cmd_wigner(resolve_config(wigner_args), resolve_flags(wigner_args));
            return 0;
        }
        if (semi->parsed()) {
            pdnr::cmd_semiclassical(resolve_config(semi_args), resolve_flags(semi_args));
            return 0;
        }
        if (classify->parsed()) {
            std::cout << pdnr::classify_report(resolve_config(classify_args));
            return 0;
        }
    } catch (const pdnr::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
