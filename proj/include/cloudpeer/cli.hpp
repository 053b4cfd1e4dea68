#pragma once

#include "cloudpeer/provisioner.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cloudpeer::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,
    exit_starvation = 2,
    exit_internal_error = 3,
};

using Size = std::pair<int, int>;

struct Scenario {
    std::string name;
    provisioner::SimulationConfig sim;
    // Workload sizes to sweep; empty runs the configured sizes once.
    std::vector<Size> sweep;
};

// Throws ConfigError; syntax errors carry the line and column.
Scenario load_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::filesystem::path& path);

std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
std::string_view preset_json(std::string_view name);
Scenario load_preset(std::string_view name);

// Parses "5x5,10x10" into sizes.
std::vector<Size> parse_sizes(std::string_view text);

struct RunOutput {
    std::string scenario;
    std::uint64_t seed = 0;
    // Units per workload (largest when they differ).
    std::size_t units = 0;
    provisioner::RunLog log;
    provisioner::ScenarioMetrics metrics;
};

RunOutput run_scenario(const Scenario& s);
// One run per size, every workload resized, shared seed.
std::vector<RunOutput> sweep(const Scenario& s, std::span<const Size> sizes);
// The scenario's own sweep, or a single run when it has none.
std::vector<RunOutput> run_all(const Scenario& s);

std::string csv_header();
std::string csv_row(const RunOutput& r);
std::string csv(std::span<const RunOutput> runs);
// `grant_time query_id vm_id units`, tab-separated.
std::string allocation_log(const RunOutput& r);

// exit_starvation if any run left units unserved.
int exit_code(std::span<const RunOutput> runs);

struct OracleReport {
    std::size_t discoveries = 0;
    std::size_t updates = 0;
    std::vector<std::string> distributed_grants;
    std::vector<std::string> central_grants;
    std::size_t rendezvous_violations = 0;

    bool equal() const { return distributed_grants == central_grants && rendezvous_violations == 0; }
};

inline constexpr std::size_t kOracleMaxQueries = 8;
inline constexpr std::size_t kOracleMaxUpdates = 8;
inline constexpr int kOracleMaxFmin = 4;

// Replays the scripted discoveries and updates through the cell matchmaker
// and the central matcher. Throws ConfigError beyond the oracle bounds.
OracleReport oracle_check(const Scenario& s);
std::string format_report(const OracleReport& r);

} // namespace cloudpeer::cli
