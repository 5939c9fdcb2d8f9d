#include "medforge/orchestrator.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "medforge/contamination.hpp"
#include "medforge/corpus.hpp"
#include "medforge/dedup.hpp"
#include "medforge/filters.hpp"
#include "medforge/mixture.hpp"
#include "medforge/text.hpp"

namespace medforge::orchestrator {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kConfigSchemaVersion = 1;

struct StageSchema {
    std::set<std::string> required;
    std::set<std::string> optional;
    std::vector<std::string> input_path_keys;  // must exist at run start
};

const std::map<std::string, StageSchema>& stage_schemas() {
    static const std::map<std::string, StageSchema> kSchemas = {
        {"filter",
         {{"stage", "input", "output"},
          {"filters", "min_dim", "min_tok", "max_tok"},
          {"input"}}},
        {"dedup_images",
         {{"stage", "input", "output"}, {"scope", "class_report"}, {"input"}}},
        {"dedup_texts",
         {{"stage", "input", "output"}, {"threshold", "class_report"}, {"input"}}},
        {"scrub", {{"stage", "input", "index", "output"}, {}, {"input", "index"}}},
        {"mix", {{"stage", "inputs", "output"}, {"caps", "modality_caps"}, {}}},
        {"rl",
         {{"stage", "inputs", "output"},
          {"target_binary_frac", "max_answer_tokens"},
          {}}},
    };
    return kSchemas;
}

void validate_stage(const json& stage) {
    if (!stage.is_object()) throw ConfigError("stage entry must be an object");
    if (!stage.contains("stage") || !stage["stage"].is_string())
        throw ConfigError("stage entry missing 'stage' name");
    std::string name = stage["stage"].get<std::string>();
    auto it = stage_schemas().find(name);
    if (it == stage_schemas().end()) throw ConfigError("unknown stage: " + name);
    const StageSchema& schema = it->second;
    for (const auto& [key, _] : stage.items()) {
        if (!schema.required.count(key) && !schema.optional.count(key))
            throw ConfigError("unknown key '" + key + "' in stage " + name);
    }
    for (const auto& key : schema.required) {
        if (!stage.contains(key))
            throw ConfigError("stage " + name + " missing required key '" + key + "'");
    }
    for (const auto& key : schema.input_path_keys) {
        std::string path = stage.at(key).get<std::string>();
        if (!fs::exists(path))
            throw ConfigError("stage " + name + ": input path does not exist: " + path);
    }
    if (stage.contains("inputs")) {
        if (!stage["inputs"].is_array() || stage["inputs"].empty())
            throw ConfigError("stage " + name + ": 'inputs' must be a non-empty array");
        for (const auto& p : stage["inputs"]) {
            if (!fs::exists(p.get<std::string>()))
                throw ConfigError("stage " + name + ": input path does not exist: " +
                                  p.get<std::string>());
        }
    }
}

std::vector<corpus::DatasetManifest> load_inputs(const json& stage) {
    std::vector<corpus::DatasetManifest> out;
    for (const auto& p : stage.at("inputs"))
        out.push_back(corpus::load_manifest(p.get<std::string>()));
    return out;
}

StageReport run_stage(const json& stage, std::uint64_t seed) {
    StageReport report;
    report.stage = stage["stage"].get<std::string>();
    auto t0 = std::chrono::steady_clock::now();

    if (report.stage == "filter") {
        auto m = corpus::load_manifest(stage["input"].get<std::string>());
        filters::PipelineOptions opts;
        if (stage.contains("min_dim")) opts.min_dim = stage["min_dim"].get<int>();
        if (stage.contains("min_tok")) opts.min_tok = stage["min_tok"].get<std::size_t>();
        if (stage.contains("max_tok")) opts.max_tok = stage["max_tok"].get<std::size_t>();
        std::vector<std::string> names = {"image_size", "caption_length"};
        if (stage.contains("filters")) names = stage["filters"].get<std::vector<std::string>>();
        auto [filtered, freport] = filters::run_pipeline(m, names, opts);
        corpus::write_manifest(filtered, stage["output"].get<std::string>());
        report.input_count = freport.input_count;
        report.kept_count = freport.kept_count;
        report.removed_count = freport.removed_count;
    } else if (report.stage == "dedup_images") {
        auto m = corpus::load_manifest(stage["input"].get<std::string>());
        auto scope = dedup::Scope::cross_dataset;
        if (stage.value("scope", "cross") == "within") scope = dedup::Scope::within_dataset;
        auto [deduped, classes] = dedup::dedup_images(m, scope);
        corpus::write_manifest(deduped, stage["output"].get<std::string>());
        if (stage.contains("class_report"))
            dedup::write_class_report(classes, stage["class_report"].get<std::string>());
        report.input_count = m.samples.size();
        report.kept_count = deduped.samples.size();
        report.removed_count = report.input_count - report.kept_count;
    } else if (report.stage == "dedup_texts") {
        auto m = corpus::load_manifest(stage["input"].get<std::string>());
        dedup::TextDedupParams params;
        if (stage.contains("threshold")) params.threshold = stage["threshold"].get<double>();
        auto [deduped, classes] = dedup::dedup_texts({m}, params);
        corpus::write_manifest(deduped.front(), stage["output"].get<std::string>());
        if (stage.contains("class_report"))
            dedup::write_class_report(classes, stage["class_report"].get<std::string>());
        report.input_count = m.samples.size();
        report.kept_count = deduped.front().samples.size();
        report.removed_count = report.input_count - report.kept_count;
    } else if (report.stage == "scrub") {
        auto m = corpus::load_manifest(stage["input"].get<std::string>());
        auto idx = contamination::load_index(stage["index"].get<std::string>());
        auto [scrubbed, sreport] = contamination::scrub(m, idx);
        corpus::write_manifest(scrubbed, stage["output"].get<std::string>());
        report.input_count = sreport.input_count;
        report.kept_count = sreport.kept_count;
        report.removed_count = sreport.removed_count;
    } else if (report.stage == "mix") {
        auto manifests = load_inputs(stage);
        std::vector<std::pair<corpus::DatasetManifest, std::optional<std::size_t>>> entries;
        std::vector<std::optional<std::size_t>> caps(manifests.size());
        if (stage.contains("caps")) {
            auto raw = stage["caps"].get<std::vector<std::int64_t>>();
            for (std::size_t i = 0; i < raw.size() && i < caps.size(); ++i)
                if (raw[i] >= 0) caps[i] = static_cast<std::size_t>(raw[i]);
        }
        std::size_t total_in = 0;
        for (std::size_t i = 0; i < manifests.size(); ++i) {
            total_in += manifests[i].samples.size();
            entries.emplace_back(std::move(manifests[i]), caps[i]);
        }
        std::map<corpus::Modality, std::size_t> modality_caps;
        if (stage.contains("modality_caps")) {
            for (const auto& [key, value] : stage["modality_caps"].items())
                modality_caps[corpus::modality_from_string(key)] =
                    value.get<std::size_t>();
        }
        auto mixed = mixture::build_mixture_from(entries, modality_caps, seed);
        corpus::write_manifest(mixed, stage["output"].get<std::string>());
        report.input_count = total_in;
        report.kept_count = mixed.samples.size();
        report.removed_count = total_in - mixed.samples.size();
    } else if (report.stage == "rl") {
        auto manifests = load_inputs(stage);
        std::size_t total_in = 0;
        for (const auto& m : manifests) total_in += m.samples.size();
        mixture::RlOptions opts;
        if (stage.contains("target_binary_frac"))
            opts.target_binary_frac = stage["target_binary_frac"].get<double>();
        if (stage.contains("max_answer_tokens"))
            opts.max_answer_tokens = stage["max_answer_tokens"].get<std::size_t>();
        auto rl = mixture::build_rl_dataset(manifests, seed, opts);
        corpus::write_manifest(rl, stage["output"].get<std::string>());
        report.input_count = total_in;
        report.kept_count = rl.samples.size();
        report.removed_count = total_in - rl.samples.size();
    }

    auto t1 = std::chrono::steady_clock::now();
    report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return report;
}

}  // namespace

json RunReport::to_json() const {
    json stages_json = json::array();
    for (const auto& s : stages) {
        stages_json.push_back({{"stage", s.stage},
                               {"input_count", s.input_count},
                               {"kept_count", s.kept_count},
                               {"removed_count", s.removed_count},
                               {"wall_ms", s.wall_ms}});
    }
    return json{{"schema_version", kConfigSchemaVersion}, {"stages", stages_json}};
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object())
        throw ConfigError("config is not a JSON object: " + path);

    static const std::set<std::string> kTopKeys = {"schema_version", "seed", "provider",
                                                   "report", "stages"};
    for (const auto& [key, _] : cfg.items())
        if (!kTopKeys.count(key)) throw ConfigError("unknown config key: " + key);
    if (cfg.value("schema_version", kConfigSchemaVersion) != kConfigSchemaVersion)
        throw ConfigError("unsupported config schema_version");
    if (!cfg.contains("stages") || !cfg["stages"].is_array())
        throw ConfigError("config missing 'stages' array");

    PipelineConfig out;
    out.seed = cfg.value("seed", std::uint64_t{0});
    out.provider = cfg.value("provider", "");
    out.report_path = cfg.value("report", "");
    for (const auto& stage : cfg["stages"]) {
        validate_stage(stage);
        out.stages.push_back(stage);
    }
    return out;
}

RunReport run(const std::string& config_path) {
    PipelineConfig cfg = load_config(config_path);
    RunReport report;
    for (const auto& stage : cfg.stages) {
        try {
            report.stages.push_back(run_stage(stage, cfg.seed));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(stage["stage"].get<std::string>(), e.what());
        }
    }
    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        if (!out) throw ConfigError("cannot write report: " + cfg.report_path);
        out << report.to_json().dump(2) << "\n";
    }
    return report;
}

std::string version_info() {
    // The fingerprint covers every tunable metric/matching default so that a
    // change in defaults is visible in recorded run metadata.
    std::string params =
        "rouge_l:F=2PR/(P+R);bleu:max_n=4,eps=1e-9;"
        "meteor:alpha=0.9,gamma=0.5,beta=3;cider:n=4,scale=10;"
        "minhash:k=128,bands=16,rows=8,w=5,seed=0x5EED,threshold=0.8;"
        "phash:dhash64,hamming=0;filter:min_dim=64,tok=[10,1024];rl:frac=0.05";
    std::uint64_t fp = text::fnv1a64(params);
    std::ostringstream out;
    out << "medforge " << kVersion << " (schema_version " << kConfigSchemaVersion
        << ", metric fingerprint " << std::hex << fp << ")";
    return out.str();
}

}  // namespace medforge::orchestrator
