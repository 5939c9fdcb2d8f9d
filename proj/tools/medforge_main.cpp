#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "medforge/client.hpp"
#include "medforge/contamination.hpp"
#include "medforge/corpus.hpp"
#include "medforge/dedup.hpp"
#include "medforge/eval.hpp"
#include "medforge/filters.hpp"
#include "medforge/metrics.hpp"
#include "medforge/mixture.hpp"
#include "medforge/orchestrator.hpp"
#include "medforge/prompts.hpp"
#include "medforge/synth.hpp"

namespace {

using nlohmann::json;
using namespace medforge;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

std::vector<json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw orchestrator::ConfigError("cannot open: " + path);
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(json::parse(line));
    }
    return out;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw orchestrator::ConfigError("cannot write: " + path);
    for (const auto& l : lines) out << l << "\n";
}

int cmd_filter(const std::string& input, const std::string& output,
               std::vector<std::string> stages, int min_dim, std::size_t min_tok,
               std::size_t max_tok, const std::string& provider,
               const std::string& report_path) {
    auto m = corpus::load_manifest(input);
    filters::PipelineOptions opts;
    opts.min_dim = min_dim;
    opts.min_tok = min_tok;
    opts.max_tok = max_tok;
    std::unique_ptr<client::AnnotatorClient> cl;
    prompts::Prompts prompts;
    if (!provider.empty()) {
        cl = client::make_client(provider);
        opts.dialogue_client = cl.get();
        opts.dialogue_prompt = prompts.get("prompts/dialogue_response_cleaning.txt");
    }
    if (stages.empty()) stages = {"image_size", "caption_length"};
    auto [filtered, report] = filters::run_pipeline(m, stages, opts);
    corpus::write_manifest(filtered, output);
    if (!report_path.empty()) {
        std::vector<std::string> lines;
        for (const auto& [id, rule] : report.removals) lines.push_back(id + "\t" + rule);
        write_lines(report_path, lines);
    }
    std::cout << "kept " << report.kept_count << " / " << report.input_count << "\n";
    return kExitOk;
}

int cmd_dedup(const std::string& input, const std::string& output,
              const std::string& mode, const std::string& scope, double threshold,
              const std::string& class_report) {
    auto m = corpus::load_manifest(input);
    std::vector<dedup::DuplicateClass> classes;
    corpus::DatasetManifest result;
    if (mode == "images") {
        auto s = scope == "within" ? dedup::Scope::within_dataset
                                   : dedup::Scope::cross_dataset;
        std::tie(result, classes) = dedup::dedup_images(m, s);
    } else if (mode == "texts") {
        dedup::TextDedupParams params;
        params.threshold = threshold;
        auto [manifests, cls] = dedup::dedup_texts({m}, params);
        result = std::move(manifests.front());
        classes = std::move(cls);
    } else {
        throw orchestrator::ConfigError("dedup mode must be images or texts");
    }
    corpus::write_manifest(result, output);
    if (!class_report.empty()) dedup::write_class_report(classes, class_report);
    std::cout << "kept " << result.samples.size() << " / " << m.samples.size() << " ("
              << classes.size() << " duplicate classes)\n";
    return kExitOk;
}

int cmd_scrub(const std::string& input, const std::string& index_path,
              const std::string& output, const std::vector<std::string>& benchmarks) {
    if (!benchmarks.empty()) {
        std::vector<corpus::DatasetManifest> bm;
        for (const auto& p : benchmarks) bm.push_back(corpus::load_manifest(p));
        contamination::save_index(contamination::build_index(bm), index_path);
        std::cout << "index written to " << index_path << "\n";
        if (input.empty()) return kExitOk;
    }
    auto m = corpus::load_manifest(input);
    auto idx = contamination::load_index(index_path);
    auto [scrubbed, report] = contamination::scrub(m, idx);
    corpus::write_manifest(scrubbed, output);
    std::cout << "kept " << report.kept_count << " / " << report.input_count << "\n";
    return kExitOk;
}

int cmd_synth(const std::string& mode, const std::string& input,
              const std::string& output, const std::string& provider,
              const std::string& image_dir, std::uint64_t seed,
              const std::string& question, std::vector<std::string> pool,
              int n_options) {
    prompts::Prompts prompts;
    std::unique_ptr<client::AnnotatorClient> cl;
    if (!provider.empty()) cl = client::make_client(provider);

    corpus::DatasetManifest out_manifest;
    out_manifest.name = "synth_" + mode;

    if (mode == "ocr") {
        std::vector<synth::OcrQuestion> questions;
        for (const auto& j : read_jsonl(input))
            questions.push_back({j.at("id").get<std::string>(),
                                 j.at("question").get<std::string>(),
                                 j.at("ground_truth").get<std::string>()});
        if (!cl) throw orchestrator::ConfigError("ocr mode requires --provider");
        auto result = synth::synthesize_ocr_samples(questions, *cl, image_dir);
        out_manifest.samples = std::move(result.samples);
        std::cout << "kept " << result.report.kept_count << " / "
                  << result.report.input_count << "\n";
    } else if (mode == "template_vqa") {
        std::vector<synth::LabeledRecord> records;
        for (const auto& j : read_jsonl(input)) {
            synth::LabeledRecord r;
            r.id = j.at("id").get<std::string>();
            r.label = j.at("label").get<std::string>();
            if (j.contains("image"))
                r.images.push_back(
                    corpus::ImageRef{j["image"].get<std::string>(), 0, 0, std::nullopt});
            records.push_back(std::move(r));
        }
        synth::QATemplate tpl;
        tpl.question_text = question;
        tpl.distractor_pool = pool;
        out_manifest.samples = synth::template_vqa(records, tpl, n_options, seed);
        std::cout << "synthesized " << out_manifest.samples.size() << " samples\n";
    } else if (mode == "cot" || mode == "validate_cot") {
        if (!cl) throw orchestrator::ConfigError(mode + " mode requires --provider");
        auto m = corpus::load_manifest(input);
        auto result = mode == "cot" ? synth::distill_cot(m.samples, *cl, prompts)
                                    : synth::validate_cot(m.samples, *cl, prompts);
        out_manifest.samples = std::move(result.samples);
        std::cout << "kept " << result.report.kept_count << " / "
                  << result.report.input_count << "\n";
    } else {
        throw orchestrator::ConfigError("unknown synth mode: " + mode);
    }
    corpus::write_manifest(out_manifest, output);
    return kExitOk;
}

int cmd_mix(const std::vector<std::string>& inputs, const std::vector<std::int64_t>& caps,
            const std::string& output, std::uint64_t seed) {
    std::vector<std::pair<corpus::DatasetManifest, std::optional<std::size_t>>> entries;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::optional<std::size_t> cap;
        if (i < caps.size() && caps[i] >= 0) cap = static_cast<std::size_t>(caps[i]);
        entries.emplace_back(corpus::load_manifest(inputs[i]), cap);
    }
    auto mixed = mixture::build_mixture_from(entries, {}, seed);
    corpus::write_manifest(mixed, output);
    std::cout << "mixed " << mixed.samples.size() << " samples\n";
    return kExitOk;
}

int cmd_reward(const std::string& responses_path, const std::string& refs_path,
               const std::string& out_path) {
    auto refs = corpus::load_manifest(refs_path);
    std::map<std::string, const corpus::Sample*> by_id;
    for (const auto& s : refs.samples) by_id[s.id] = &s;

    std::vector<std::string> lines;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& j : read_jsonl(responses_path)) {
        std::string id = j.at("id").get<std::string>();
        std::string response = j.at("response").get<std::string>();
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw orchestrator::ConfigError("response id not in refs: " + id);
        int fmt = mixture::format_reward(response);
        int acc = mixture::accuracy_reward(response, *it->second);
        double total = mixture::total_reward(response, *it->second);
        sum += total;
        ++n;
        json rec = {{"id", id}, {"format", fmt}, {"accuracy", acc}, {"total", total}};
        lines.push_back(rec.dump());
    }
    if (!out_path.empty()) write_lines(out_path, lines);
    for (const auto& l : lines) std::cout << l << "\n";
    std::cout << "mean " << (n ? sum / static_cast<double>(n) : 0.0) << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& benchmark, const std::string& manifest_path,
             const std::string& model_provider, const std::string& judge_provider,
             const std::string& predictions_cache, const std::string& verdicts_path) {
    prompts::Prompts prompts;
    auto m = corpus::load_manifest(manifest_path);
    auto records = eval::load_benchmark(m, benchmark);

    // A predictions cache enables judge-only re-runs without the model client.
    std::map<std::string, std::string> cached;
    if (!predictions_cache.empty()) {
        std::ifstream in(predictions_cache);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            cached[j.at("id").get<std::string>()] = j.at("prediction").get<std::string>();
        }
    }
    for (auto& r : records) {
        auto it = cached.find(r.sample.id);
        if (it != cached.end()) r.prediction = it->second;
    }

    std::unique_ptr<client::AnnotatorClient> model, judge;
    if (!model_provider.empty()) model = client::make_client(model_provider);
    if (!judge_provider.empty()) judge = client::make_client(judge_provider);

    auto result = eval::run_benchmark(std::move(records), model.get(), judge.get(), prompts);

    if (!predictions_cache.empty()) {
        std::vector<std::string> lines;
        for (const auto& r : result.records) {
            if (!r.prediction) continue;
            lines.push_back(json{{"id", r.sample.id}, {"prediction", *r.prediction}}.dump());
        }
        write_lines(predictions_cache, lines);
    }
    if (!verdicts_path.empty()) {
        std::vector<std::string> lines;
        for (const auto& r : result.records) {
            json rec = {{"id", r.sample.id},
                        {"question_type", eval::to_string(r.question_type)}};
            if (r.prediction) rec["prediction"] = *r.prediction;
            if (r.correct) rec["correct"] = *r.correct;
            if (r.judge_think) rec["judge_think"] = *r.judge_think;
            lines.push_back(rec.dump());
        }
        write_lines(verdicts_path, lines);
    }

    json summary = {{"benchmark", benchmark},
                    {"judged", result.judged},
                    {"correct", result.correct},
                    {"unjudged", result.unjudged},
                    {"client_errors", result.client_errors}};
    if (result.accuracy) summary["accuracy"] = *result.accuracy;
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

int cmd_metrics(const std::string& pred_path, const std::string& ref_path,
                const std::vector<std::string>& names, bool scale) {
    auto preds = read_jsonl(pred_path);
    auto refs_raw = read_jsonl(ref_path);
    std::map<std::string, std::vector<std::string>> refs;
    for (const auto& j : refs_raw) {
        std::string id = j.at("id").get<std::string>();
        if (j.contains("texts"))
            refs[id] = j["texts"].get<std::vector<std::string>>();
        else
            refs[id] = {j.at("text").get<std::string>()};
    }

    std::vector<std::string> candidates;
    std::vector<std::vector<std::string>> references;
    for (const auto& j : preds) {
        std::string id = j.at("id").get<std::string>();
        auto it = refs.find(id);
        if (it == refs.end())
            throw orchestrator::ConfigError("prediction id not in refs: " + id);
        candidates.push_back(j.at("text").get<std::string>());
        references.push_back(it->second);
    }
    if (candidates.empty()) throw orchestrator::ConfigError("no predictions to score");

    auto wants = [&](const std::string& n) {
        return names.empty() || std::find(names.begin(), names.end(), n) != names.end();
    };

    metrics::MetricReport report;
    std::size_t n = candidates.size();
    if (wants("rouge_l")) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += metrics::rouge_l(candidates[i], references[i].front());
        report.rouge_l = sum / static_cast<double>(n);
    }
    if (wants("bleu")) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += metrics::bleu(candidates[i], references[i]);
        report.bleu = sum / static_cast<double>(n);
    }
    if (wants("meteor")) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += metrics::meteor_lite(candidates[i], references[i].front());
        report.meteor = sum / static_cast<double>(n);
    }
    if (wants("cider")) report.cider = metrics::cider(candidates, references);
    if (scale) report = metrics::scale_report(report);

    json out = {{"rouge_l", report.rouge_l},
                {"bleu", report.bleu},
                {"meteor", report.meteor},
                {"cider", report.cider},
                {"scaled", report.scaled},
                {"count", n}};
    std::cout << out.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"medforge: medical multimodal corpus curation and evaluation"};
    app.require_subcommand(1);

    // filter
    auto* filter = app.add_subcommand("filter", "Run quality filters over a manifest");
    std::string f_input, f_output, f_provider, f_report;
    std::vector<std::string> f_stages;
    int f_min_dim = 64;
    std::size_t f_min_tok = 10, f_max_tok = 1024;
    filter->add_option("--input", f_input)->required();
    filter->add_option("--output", f_output)->required();
    filter->add_option("--filters", f_stages);
    filter->add_option("--min-dim", f_min_dim);
    filter->add_option("--min-tok", f_min_tok);
    filter->add_option("--max-tok", f_max_tok);
    filter->add_option("--provider", f_provider);
    filter->add_option("--report", f_report);

    // dedup
    auto* dedup_cmd = app.add_subcommand("dedup", "Remove duplicate samples");
    std::string d_input, d_output, d_mode = "images", d_scope = "cross", d_classes;
    double d_threshold = 0.8;
    dedup_cmd->add_option("--input", d_input)->required();
    dedup_cmd->add_option("--output", d_output)->required();
    dedup_cmd->add_option("--mode", d_mode)->check(CLI::IsMember({"images", "texts"}));
    dedup_cmd->add_option("--scope", d_scope)->check(CLI::IsMember({"within", "cross"}));
    dedup_cmd->add_option("--threshold", d_threshold);
    dedup_cmd->add_option("--class-report", d_classes);

    // scrub
    auto* scrub = app.add_subcommand("scrub", "Remove benchmark-contaminated samples");
    std::string s_input, s_index, s_output;
    std::vector<std::string> s_benchmarks;
    scrub->add_option("--input", s_input);
    scrub->add_option("--index", s_index)->required();
    scrub->add_option("--output", s_output);
    scrub->add_option("--benchmarks", s_benchmarks);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize training samples");
    std::string sy_mode, sy_input, sy_output, sy_provider, sy_image_dir, sy_question;
    std::vector<std::string> sy_pool;
    std::uint64_t sy_seed = 0;
    int sy_n_options = 4;
    synth_cmd->add_option("--mode", sy_mode)
        ->required()
        ->check(CLI::IsMember({"ocr", "template_vqa", "cot", "validate_cot"}));
    synth_cmd->add_option("--input", sy_input)->required();
    synth_cmd->add_option("--output", sy_output)->required();
    synth_cmd->add_option("--provider", sy_provider);
    synth_cmd->add_option("--image-dir", sy_image_dir);
    synth_cmd->add_option("--seed", sy_seed);
    synth_cmd->add_option("--question", sy_question);
    synth_cmd->add_option("--pool", sy_pool);
    synth_cmd->add_option("--n-options", sy_n_options);

    // mix
    auto* mix = app.add_subcommand("mix", "Build a training mixture");
    std::vector<std::string> m_inputs;
    std::vector<std::int64_t> m_caps;
    std::string m_output;
    std::uint64_t m_seed = 0;
    mix->add_option("--inputs", m_inputs)->required();
    mix->add_option("--caps", m_caps);
    mix->add_option("--output", m_output)->required();
    mix->add_option("--seed", m_seed);

    // reward
    auto* reward = app.add_subcommand("reward", "Score verifiable rewards");
    std::string r_responses, r_refs, r_out;
    reward->add_option("--responses", r_responses)->required();
    reward->add_option("--refs", r_refs)->required();
    reward->add_option("--out", r_out);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Run a benchmark evaluation");
    std::string e_benchmark, e_manifest, e_model, e_judge, e_cache, e_verdicts;
    eval_cmd->add_option("--benchmark", e_benchmark)->required();
    eval_cmd->add_option("--manifest", e_manifest)->required();
    eval_cmd->add_option("--model-endpoint,--model-provider", e_model);
    eval_cmd->add_option("--judge-endpoint,--judge-provider", e_judge);
    eval_cmd->add_option("--predictions-cache", e_cache);
    eval_cmd->add_option("--verdicts", e_verdicts);

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "Score report-generation metrics");
    std::string mt_pred, mt_ref;
    std::vector<std::string> mt_names;
    bool mt_scale = false;
    metrics_cmd->add_option("--pred", mt_pred)->required();
    metrics_cmd->add_option("--ref", mt_ref)->required();
    metrics_cmd->add_option("--metrics", mt_names)->delimiter(',');
    metrics_cmd->add_flag("--scale", mt_scale);

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a declarative pipeline config");
    std::string run_config;
    run_cmd->add_option("--config", run_config)->required();

    app.add_subcommand("version", "Print version and parameter fingerprint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (filter->parsed())
            return cmd_filter(f_input, f_output, f_stages, f_min_dim, f_min_tok, f_max_tok,
                              f_provider, f_report);
        if (dedup_cmd->parsed())
            return cmd_dedup(d_input, d_output, d_mode, d_scope, d_threshold, d_classes);
        if (scrub->parsed()) return cmd_scrub(s_input, s_index, s_output, s_benchmarks);
        if (synth_cmd->parsed())
            return cmd_synth(sy_mode, sy_input, sy_output, sy_provider, sy_image_dir,
                             sy_seed, sy_question, sy_pool, sy_n_options);
        if (mix->parsed()) return cmd_mix(m_inputs, m_caps, m_output, m_seed);
        if (reward->parsed()) return cmd_reward(r_responses, r_refs, r_out);
        if (eval_cmd->parsed())
            return cmd_eval(e_benchmark, e_manifest, e_model, e_judge, e_cache, e_verdicts);
        if (metrics_cmd->parsed())
            return cmd_metrics(mt_pred, mt_ref, mt_names, mt_scale);
        if (run_cmd->parsed()) {
            auto report = orchestrator::run(run_config);
            std::cout << report.to_json().dump(2) << "\n";
            return kExitOk;
        }
        std::cout << orchestrator::version_info() << "\n";
        return kExitOk;
    } catch (const orchestrator::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const corpus::ManifestError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const orchestrator::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
}
