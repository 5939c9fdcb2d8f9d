#include "medforge/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "medforge/text.hpp"

namespace medforge::corpus {

using json = nlohmann::json;

std::string to_string(TaskKind k) {
    switch (k) {
        case TaskKind::caption: return "caption";
        case TaskKind::vqa_open: return "vqa_open";
        case TaskKind::vqa_mcq: return "vqa_mcq";
        case TaskKind::report: return "report";
        case TaskKind::dialogue: return "dialogue";
        case TaskKind::text_qa: return "text_qa";
        case TaskKind::reasoning: return "reasoning";
    }
    return "caption";
}

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "caption") return TaskKind::caption;
    if (s == "vqa_open") return TaskKind::vqa_open;
    if (s == "vqa_mcq") return TaskKind::vqa_mcq;
    if (s == "report") return TaskKind::report;
    if (s == "dialogue") return TaskKind::dialogue;
    if (s == "text_qa") return TaskKind::text_qa;
    if (s == "reasoning") return TaskKind::reasoning;
    throw ManifestError("unknown task_kind: " + s);
}

std::string to_string(Modality m) {
    switch (m) {
        case Modality::xray: return "xray";
        case Modality::ct: return "ct";
        case Modality::mri: return "mri";
        case Modality::ultrasound: return "ultrasound";
        case Modality::dermoscopy: return "dermoscopy";
        case Modality::fundus: return "fundus";
        case Modality::histopathology: return "histopathology";
        case Modality::microscopy: return "microscopy";
        case Modality::oct: return "oct";
        case Modality::endoscopy: return "endoscopy";
        case Modality::chart: return "chart";
        case Modality::pure_text: return "pure_text";
        case Modality::other: return "other";
    }
    return "other";
}

Modality modality_from_string(const std::string& s) {
    static const std::map<std::string, Modality> table = {
        {"xray", Modality::xray},
        {"ct", Modality::ct},
        {"mri", Modality::mri},
        {"ultrasound", Modality::ultrasound},
        {"dermoscopy", Modality::dermoscopy},
        {"fundus", Modality::fundus},
        {"histopathology", Modality::histopathology},
        {"microscopy", Modality::microscopy},
        {"oct", Modality::oct},
        {"endoscopy", Modality::endoscopy},
        {"chart", Modality::chart},
        {"pure_text", Modality::pure_text},
        {"other", Modality::other},
    };
    auto it = table.find(s);
    return it == table.end() ? Modality::other : it->second;
}

void validate_sample(const Sample& s) {
    if (s.id.empty()) throw ManifestError("field `id` must be non-empty");
    for (const ImageRef& im : s.images) {
        if (im.width_px < 1 || im.height_px < 1) {
            throw ManifestError("field `images` has non-positive dimensions in sample " + s.id);
        }
    }
    if (s.task_kind == TaskKind::vqa_mcq) {
        if (!s.options || s.options->empty()) {
            throw ManifestError("field `options` must be non-empty for vqa_mcq sample " + s.id);
        }
        if (!s.answer) throw ManifestError("field `answer` missing for vqa_mcq sample " + s.id);
        auto n = std::count(s.options->begin(), s.options->end(), *s.answer);
        if (n != 1) {
            throw ManifestError("field `answer` must match exactly one option in sample " + s.id);
        }
    }
    if (s.task_kind == TaskKind::caption) {
        if (s.images.empty()) {
            throw ManifestError("field `images` must be non-empty for caption sample " + s.id);
        }
        if (!s.answer) throw ManifestError("field `answer` missing for caption sample " + s.id);
    }
}

Sample sample_from_json_line(const std::string& line) {
    json j = json::parse(line);
    if (!j.contains("schema_version")) throw ManifestError("field `schema_version` missing");
    int sv = j.at("schema_version").get<int>();
    if (sv != kSchemaVersion) {
        throw ManifestError("unsupported schema_version " + std::to_string(sv));
    }
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.source_dataset = j.value("source_dataset", std::string{});
    s.source_priority = j.value("source_priority", 0);
    s.task_kind = task_kind_from_string(j.at("task_kind").get<std::string>());
    if (j.contains("images")) {
        for (const auto& ji : j.at("images")) {
            ImageRef im;
            im.uri = ji.at("uri").get<std::string>();
            im.width_px = ji.at("width_px").get<int>();
            im.height_px = ji.at("height_px").get<int>();
            if (ji.contains("phash")) {
                im.phash = std::stoull(ji.at("phash").get<std::string>(), nullptr, 16);
            }
            s.images.push_back(std::move(im));
        }
    }
    if (j.contains("question")) s.question = j.at("question").get<std::string>();
    if (j.contains("options")) s.options = j.at("options").get<std::vector<std::string>>();
    if (j.contains("answer")) s.answer = j.at("answer").get<std::string>();
    if (j.contains("rationale")) s.rationale = j.at("rationale").get<std::string>();
    if (j.contains("modality")) s.modality = modality_from_string(j.at("modality").get<std::string>());
    if (j.contains("meta")) s.meta = j.at("meta").get<std::map<std::string, std::string>>();
    validate_sample(s);
    return s;
}

std::string sample_to_json_line(const Sample& s) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["id"] = s.id;
    j["source_dataset"] = s.source_dataset;
    j["source_priority"] = s.source_priority;
    j["task_kind"] = to_string(s.task_kind);
    if (!s.images.empty()) {
        json arr = json::array();
        for (const ImageRef& im : s.images) {
            json ji;
            ji["uri"] = im.uri;
            ji["width_px"] = im.width_px;
            ji["height_px"] = im.height_px;
            if (im.phash) {
                char buf[17];
                std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(*im.phash));
                ji["phash"] = buf;
            }
            arr.push_back(std::move(ji));
        }
        j["images"] = std::move(arr);
    }
    if (s.question) j["question"] = *s.question;
    if (s.options) j["options"] = *s.options;
    if (s.answer) j["answer"] = *s.answer;
    if (s.rationale) j["rationale"] = *s.rationale;
    if (s.modality) j["modality"] = to_string(*s.modality);
    if (!s.meta.empty()) j["meta"] = s.meta;
    return j.dump();
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest: " + path);
    DatasetManifest m;
    m.name = std::filesystem::path(path).stem().string();
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Sample s;
        try {
            s = sample_from_json_line(line);
        } catch (const json::exception& e) {
            throw ManifestError(path + ":" + std::to_string(lineno) + ": parse error: " + e.what());
        } catch (const ManifestError& e) {
            throw ManifestError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(s.id).second) {
            throw ManifestError(path + ":" + std::to_string(lineno) + ": duplicate id " + s.id);
        }
        m.samples.push_back(std::move(s));
    }
    return m;
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError("cannot write manifest: " + path);
    for (const Sample& s : m.samples) {
        validate_sample(s);
        try {
            out << sample_to_json_line(s) << "\n";
        } catch (const json::exception& e) {
            throw ManifestError("cannot encode sample " + s.id + ": " + e.what());
        }
    }
    if (!out) throw ManifestError("I/O error writing manifest: " + path);
}

std::size_t count_tokens(const std::string& s) { return text::count_tokens(s); }

}  // namespace medforge::corpus
