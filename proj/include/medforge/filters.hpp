#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "medforge/client.hpp"
#include "medforge/corpus.hpp"

namespace medforge::filters {

struct FilterReport {
    std::size_t input_count = 0;
    std::size_t kept_count = 0;
    std::size_t removed_count = 0;
    std::vector<std::pair<std::string, std::string>> removals;  // (sample id, rule name)

    void merge(const FilterReport& other);
};

struct FilterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Keeps samples whose every image has min(width, height) >= min_dim.
// Text-only samples pass vacuously. Removals attributed to rule "image_size".
std::pair<corpus::DatasetManifest, FilterReport> filter_image_size(
    const corpus::DatasetManifest& m, int min_dim = 64);

// Keeps captions with min_tok <= count_tokens(answer) <= max_tok (inclusive).
// Non-caption samples pass untouched; concise instruction answers stay valid.
std::pair<corpus::DatasetManifest, FilterReport> filter_caption_length(
    const corpus::DatasetManifest& m, std::size_t min_tok = 10, std::size_t max_tok = 1024);

// Rewrites a dialogue sample's answer through the annotator; the returned
// answer is the client output with the "Revised response:" prefix stripped.
corpus::Sample clean_dialogue_response(const corpus::Sample& s, client::AnnotatorClient& cl,
                                       const std::string& prompt_template,
                                       const client::RetryPolicy& retry = {});

struct PipelineOptions {
    int min_dim = 64;
    std::size_t min_tok = 10;
    std::size_t max_tok = 1024;
    client::AnnotatorClient* dialogue_client = nullptr;
    std::string dialogue_prompt;
    client::RetryPolicy retry;
};

// Stage names: image_size, caption_length, dialogue_clean. Applied in order;
// the report concatenates per-stage removals. Dialogue cleaning is fail-closed:
// client errors drop the sample with a report entry.
std::pair<corpus::DatasetManifest, FilterReport> run_pipeline(
    const corpus::DatasetManifest& m, const std::vector<std::string>& stages,
    const PipelineOptions& opts = {});

}  // namespace medforge::filters
