// dbarlab: run weighted dbar experiments from config files or bundled presets.
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dbarlab/config.hpp"
#include "dbarlab/errors.hpp"
#include "dbarlab/field_io.hpp"
#include "dbarlab/presets.hpp"
#include "dbarlab/runner.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for weighted L2 estimates of the dbar equation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment config (.toml or .json) or a bundled preset");
    std::string config_path, preset_name, out_dir;
    int threads = 0;
    long long seed = -1;
    auto* src = run->add_option_group("source");
    src->add_option("file", config_path, "Config file (positional form of --config)");
    src->add_option("--config,-c", config_path, "Config file");
    src->add_option("--preset,-p", preset_name, "Bundled preset name");
    src->require_option(1);
    run->add_option("--out-dir,-o", out_dir, "Output directory (default out/<name>)");
    run->add_option("--threads,-t", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed,-s", seed, "Seed for randomized test data")->check(CLI::NonNegativeNumber);

    auto* pre = app.add_subcommand("presets", "List, print or export the bundled presets");
    pre->require_subcommand(1);
    auto* list = pre->add_subcommand("list", "Print preset names and the result each exercises");
    auto* show = pre->add_subcommand("show", "Print a preset's TOML");
    std::string show_name;
    show->add_option("name", show_name, "Preset name")->required();
    auto* exp = pre->add_subcommand("export", "Write every preset (and validate.toml) into a directory");
    std::string export_dir;
    exp->add_option("dir", export_dir, "Target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            dbarlab::Overrides ov;
            if (!out_dir.empty()) ov.out_dir = out_dir;
            if (threads > 0) ov.threads = threads;
            if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
            if (!preset_name.empty()) {
                const dbarlab::Preset& p = dbarlab::find_preset(preset_name);
                return dbarlab::run_config(dbarlab::parse_toml(p.text, p.name), ov, std::cout, std::cerr);
            }
            return dbarlab::run_config_file(config_path, ov, std::cout, std::cerr);
        }
        if (list->parsed()) {
            for (const auto& p : dbarlab::presets()) std::cout << p.name << "\t" << p.theorem << '\n';
            return 0;
        }
        if (show->parsed()) {
            std::cout << dbarlab::find_preset(show_name).text;
            return 0;
        }
        if (exp->parsed()) {
            for (const auto& p : dbarlab::presets()) dbarlab::write_atomic(fs::path(export_dir) / (p.name + ".toml"), p.text);
            const auto& v = dbarlab::validate_preset();
            dbarlab::write_atomic(fs::path(export_dir) / (v.name + ".toml"), v.text);
            return 0;
        }
    } catch (const dbarlab::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dbarlab::kExitConfig;
    }
    return 0;
}
