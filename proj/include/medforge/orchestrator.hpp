#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace medforge::orchestrator {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage " + stage + ": " + what), stage_name(stage) {}
    std::string stage_name;
};

struct StageReport {
    std::string stage;
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
    std::size_t removed_count = 0;
    double wall_ms = 0.0;
};

struct RunReport {
    std::vector<StageReport> stages;
    nlohmann::json to_json() const;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string provider;  // "stub:<file>" or an HTTP endpoint; may be empty
    std::string report_path;
    std::vector<nlohmann::json> stages;  // validated stage objects, in order
};

// Parses and fully validates the config before anything runs: known keys only,
// known stage names, and every referenced input path must exist.
PipelineConfig load_config(const std::string& path);

// Stage names: filter, dedup_images, dedup_texts, scrub, mix, rl.
RunReport run(const std::string& config_path);

std::string version_info();

}  // namespace medforge::orchestrator
