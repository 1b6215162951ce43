#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hcache/model.hpp"
#include "hcache/scenario.hpp"

namespace hcache {

// All on-disk formats are JSON documents tagged with a "format" field; the
// schemas are documented in the README. Delay values survive a write/read
// round trip bit-exactly.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void save_instance(const std::string& path, const ProblemInstance& instance);
ProblemInstance load_instance(const std::string& path);

void save_scenario(const std::string& path, const Scenario& scenario);
Scenario load_scenario(const std::string& path);

using AnyPlacement = std::variant<UncodedPlacement, CodedPlacement>;
void save_placement(const std::string& path, const UncodedPlacement& x);
void save_placement(const std::string& path, const CodedPlacement& rho);
AnyPlacement load_placement(const std::string& path);

// Scenario/experiment configuration file. Every field has the standard
// single-cell default; unknown fields are rejected to catch typos.
struct ScenarioFileConfig {
    ExperimentConfig experiment;
    int helper_count = 0;       // single-target generate; required there
    std::uint64_t seed = 1;     // single-seed generate
    bool has_helper_count = false;
};
ScenarioFileConfig load_scenario_config(const std::string& path);

std::string experiment_rows_csv(const std::vector<ExperimentRow>& rows);
std::string experiment_summary_csv(const std::vector<ExperimentSummary>& summaries);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

struct PhaseTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunManifest {
    std::string tool_version;
    std::string command_line;
    std::string config_digest;  // fnv1a64 of the canonical config text, hex
    std::vector<std::uint64_t> seeds;
    std::vector<PhaseTiming> phases;
};

void save_manifest(const std::string& path, const RunManifest& manifest);

extern const char* const kToolVersion;

}  // namespace hcache
