#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace medforge::corpus {

constexpr int kSchemaVersion = 1;

enum class TaskKind { caption, vqa_open, vqa_mcq, report, dialogue, text_qa, reasoning };

enum class Modality {
    xray,
    ct,
    mri,
    ultrasound,
    dermoscopy,
    fundus,
    histopathology,
    microscopy,
    oct,
    endoscopy,
    chart,
    pure_text,
    other,
};

std::string to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

std::string to_string(Modality m);
// Unknown strings map to Modality::other; upstream datasets are heterogeneous.
Modality modality_from_string(const std::string& s);

struct ImageRef {
    std::string uri;
    int width_px = 0;
    int height_px = 0;
    std::optional<std::uint64_t> phash;

    bool operator==(const ImageRef&) const = default;
};

struct Sample {
    std::string id;
    std::string source_dataset;
    int source_priority = 0;
    TaskKind task_kind = TaskKind::caption;
    std::vector<ImageRef> images;
    std::optional<std::string> question;
    std::optional<std::vector<std::string>> options;
    std::optional<std::string> answer;
    std::optional<std::string> rationale;
    std::optional<Modality> modality;
    std::map<std::string, std::string> meta;

    bool operator==(const Sample&) const = default;
};

struct DatasetManifest {
    std::string name;
    std::vector<Sample> samples;
    int schema_version = kSchemaVersion;

    bool operator==(const DatasetManifest&) const = default;
};

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-sample invariants; throws ManifestError naming the offending field.
void validate_sample(const Sample& s);

// Line-delimited JSON records, one sample per line, schema_version on each record.
DatasetManifest load_manifest(const std::string& path);
void write_manifest(const DatasetManifest& m, const std::string& path);

Sample sample_from_json_line(const std::string& line);
std::string sample_to_json_line(const Sample& s);

std::size_t count_tokens(const std::string& s);

}  // namespace medforge::corpus
