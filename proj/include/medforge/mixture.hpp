#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medforge/corpus.hpp"

namespace medforge::mixture {

enum class Stage { shallow_align, deep_align, instruction, rl };

struct MixtureEntry {
    std::string manifest_path;
    std::optional<std::size_t> cap;  // absent = take all
};

struct MixtureSpec {
    Stage stage = Stage::instruction;
    std::vector<MixtureEntry> entries;
    std::map<corpus::Modality, std::size_t> modality_caps;
};

struct MixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Seeded sampling per entry (cap exceeding availability takes all), then
// modality caps; deterministic given seed.
corpus::DatasetManifest build_mixture(const MixtureSpec& spec, std::uint64_t seed);

// In-memory variant used by build_mixture and the tests.
corpus::DatasetManifest build_mixture_from(
    const std::vector<std::pair<corpus::DatasetManifest, std::optional<std::size_t>>>&
        entries,
    const std::map<corpus::Modality, std::size_t>& modality_caps, std::uint64_t seed);

// Reformulates a short-answer MCQ as an open-ended question; token count of
// the answer must not exceed max_answer_tokens. Non-qualifying samples pass
// through unchanged; idempotent.
corpus::Sample mcq_to_open(const corpus::Sample& s, std::size_t max_answer_tokens = 5);

struct RlOptions {
    double target_binary_frac = 0.05;
    std::size_t max_answer_tokens = 5;  // mcq_to_open gate
    double balance_low = 0.40;          // MCQ share band
    double balance_high = 0.60;
};

// RLVR dataset: binary-answer samples (yes/no after normalization) are
// downsampled so binary <= frac * total + 1; qualifying MCQs reformulated as
// open-ended; MCQ/open counts balanced into the configured band.
corpus::DatasetManifest build_rl_dataset(
    const std::vector<corpus::DatasetManifest>& manifests, std::uint64_t seed,
    const RlOptions& opts = {});

struct RewardConfig {
    double format_weight = 0.5;
    double accuracy_weight = 1.0;
};

// 1 iff the response is exactly one <think> block followed by one <answer>
// block, each delimiter appearing exactly once.
int format_reward(const std::string& response);

// Final answer taken from the <answer> block (whole response when absent);
// MCQ graded through eval extraction, open-ended by normalized equality.
int accuracy_reward(const std::string& response, const corpus::Sample& gt);

double total_reward(const std::string& response, const corpus::Sample& gt,
                    const RewardConfig& cfg = {});

}  // namespace medforge::mixture
