#include "cloudpeer/cli.hpp"
#include "cloudpeer/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace cloudpeer;

namespace {

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate cloud peer service discovery over a structured overlay."};
    std::string config_path, preset, out_dir = "out", sizes, dump;
    std::optional<std::uint64_t> seed;
    bool oracle = false, trace = false, list = false;

    auto* config_opt = app.add_option("--config", config_path, "Scenario JSON file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "Built-in scenario (fig6, fig6-small, tables56, scripted-delay)")
        ->excludes(config_opt);
    app.add_option("--seed", seed, "Override the scenario seed");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--sweep", sizes, "Workload sizes to sweep, e.g. 5x5,10x10,15x15");
    app.add_flag("--oracle", oracle, "Cross-check scripted queries against the central matcher");
    app.add_flag("--trace", trace, "Write the full message trace");
    app.add_option("--dump-preset", dump, "Print a preset's JSON and exit");
    app.add_flag("--list-presets", list, "List built-in presets and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        if (list) {
            for (const auto& n : cli::preset_names())
                std::cout << n << "\n";
            return cli::exit_ok;
        }
        if (!dump.empty()) {
            std::cout << cli::preset_json(dump) << "\n";
            return cli::exit_ok;
        }
        if (config_path.empty() && preset.empty())
            throw ConfigError("", "either --config or --preset is required");

        cli::Scenario scenario = preset.empty() ? cli::load_scenario_file(config_path) : cli::load_preset(preset);
        if (seed)
            scenario.sim.seed = *seed;
        if (!sizes.empty())
            scenario.sweep = cli::parse_sizes(sizes);

        if (oracle) {
            const auto report = cli::oracle_check(scenario);
            std::cout << cli::format_report(report);
            return report.equal() ? cli::exit_ok : cli::exit_internal_error;
        }

        const auto runs = cli::run_all(scenario);
        fs::create_directories(out_dir);
        const std::string table = cli::csv(runs);
        write_file(fs::path(out_dir) / "metrics.csv", table);

        std::string allocations, hashes;
        for (const auto& r : runs) {
            const std::string tag = runs.size() > 1 ? "-" + std::to_string(r.units) : "";
            allocations += cli::allocation_log(r);
            hashes += r.scenario + "\t" + std::to_string(r.units) + "\t" + r.log.trace_hash + "\n";
            if (trace)
                write_file(fs::path(out_dir) / ("trace" + tag + ".tsv"), r.log.trace_tsv);
            for (const auto& w : r.log.warnings)
                std::cerr << "warning: " << w << "\n";
            for (const auto& u : r.log.starved_units)
                std::cerr << "starved: " << u << "\n";
            for (const auto& q : r.log.waiting_at_end)
                std::cerr << "waiting: " << q << "\n";
        }
        write_file(fs::path(out_dir) / "allocations.tsv", allocations);
        write_file(fs::path(out_dir) / "trace_hash.txt", hashes);

        std::cout << table;
        for (const auto& r : runs)
            std::cout << "trace hash " << r.scenario << " units=" << r.units << ": " << r.log.trace_hash << "\n";
        return cli::exit_code(runs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_internal_error;
    }
}
