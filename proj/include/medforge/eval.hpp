#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medforge/client.hpp"
#include "medforge/corpus.hpp"
#include "medforge/prompts.hpp"

namespace medforge::eval {

enum class QuestionType { mcq, closed, open, report };

std::string to_string(QuestionType t);

struct JudgeVerdict {
    std::string think;
    int flag = 0;  // 0 = correct, 1 = incorrect
};

struct EvalRecord {
    std::string benchmark;
    QuestionType question_type = QuestionType::open;
    corpus::Sample sample;
    std::optional<std::string> prediction;
    std::optional<bool> correct;
    std::optional<std::string> judge_think;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Benchmark registry keyed by name; throws on unknown names. Mixed-format
// benchmarks derive each record's type from the sample (options present → mcq,
// yes/no answer → closed, else open). Report benchmarks drop samples whose
// findings and impressions are both empty.
std::vector<EvalRecord> load_benchmark(const corpus::DatasetManifest& m,
                                       const std::string& name);

struct FormattedPrompt {
    std::string text;
    std::vector<std::string> image_uris;
};

FormattedPrompt format_prompt(const EvalRecord& r, const prompts::Prompts& prompts);

struct ExtractResult {
    std::size_t index = 0;
    int stage = 1;  // 1 = rule match, 2 = similarity fallback
};

// Two-stage answer extraction: rule patterns first (lone letter, "Answer: X",
// "(X)", exact option text), then normalized token-overlap similarity with
// ties broken by lowest index. Total: always returns an index.
ExtractResult extract_mcq_answer_ex(const std::string& prediction,
                                    const std::vector<std::string>& options);
std::size_t extract_mcq_answer(const std::string& prediction,
                               const std::vector<std::string>& options);

// LLM-as-judge for open-ended answers; flag parsed from <judge>0|1</judge>.
// One retry on an unparseable response, then nullopt (record left unjudged).
std::optional<JudgeVerdict> judge_open_answer(const std::string& question,
                                              const std::string& gt,
                                              const std::string& prediction,
                                              client::AnnotatorClient& judge,
                                              const prompts::Prompts& prompts);

struct BenchmarkResult {
    std::vector<EvalRecord> records;
    std::size_t judged = 0;
    std::size_t correct = 0;
    std::size_t unjudged = 0;
    std::size_t client_errors = 0;
    std::optional<double> accuracy;  // absent when nothing was judged
};

// model may be null when every record already carries a prediction (cache
// replay). Report-type records are never adjudicated here; they are scored by
// the metrics engine.
BenchmarkResult run_benchmark(std::vector<EvalRecord> records,
                              client::AnnotatorClient* model,
                              client::AnnotatorClient* judge,
                              const prompts::Prompts& prompts);

}  // namespace medforge::eval
