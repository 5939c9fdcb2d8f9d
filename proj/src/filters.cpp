#include "medforge/filters.hpp"

#include <algorithm>

#include "medforge/prompts.hpp"
#include "medforge/text.hpp"

namespace medforge::filters {

void FilterReport::merge(const FilterReport& other) {
    removed_count += other.removed_count;
    kept_count = other.kept_count;
    removals.insert(removals.end(), other.removals.begin(), other.removals.end());
}

namespace {

template <typename Pred>
std::pair<corpus::DatasetManifest, FilterReport> keep_if(const corpus::DatasetManifest& m,
                                                         const std::string& rule, Pred pred) {
    corpus::DatasetManifest out;
    out.name = m.name;
    out.schema_version = m.schema_version;
    FilterReport report;
    report.input_count = m.samples.size();
    for (const corpus::Sample& s : m.samples) {
        if (pred(s)) {
            out.samples.push_back(s);
        } else {
            report.removals.emplace_back(s.id, rule);
        }
    }
    report.kept_count = out.samples.size();
    report.removed_count = report.removals.size();
    return {std::move(out), std::move(report)};
}

}  // namespace

std::pair<corpus::DatasetManifest, FilterReport> filter_image_size(
    const corpus::DatasetManifest& m, int min_dim) {
    for (const corpus::Sample& s : m.samples) {
        for (const corpus::ImageRef& im : s.images) {
            if (im.width_px < 1 || im.height_px < 1) {
                throw FilterError("sample " + s.id + " has an image with missing dimensions");
            }
        }
    }
    return keep_if(m, "image_size", [min_dim](const corpus::Sample& s) {
        return std::all_of(s.images.begin(), s.images.end(), [min_dim](const corpus::ImageRef& im) {
            return std::min(im.width_px, im.height_px) >= min_dim;
        });
    });
}

std::pair<corpus::DatasetManifest, FilterReport> filter_caption_length(
    const corpus::DatasetManifest& m, std::size_t min_tok, std::size_t max_tok) {
    return keep_if(m, "caption_length", [&](const corpus::Sample& s) {
        if (s.task_kind != corpus::TaskKind::caption) return true;
        std::size_t n = text::count_tokens(s.answer.value_or(""));
        return n >= min_tok && n <= max_tok;
    });
}

corpus::Sample clean_dialogue_response(const corpus::Sample& s, client::AnnotatorClient& cl,
                                       const std::string& prompt_template,
                                       const client::RetryPolicy& retry) {
    static const std::string kPrefix = "Revised response:";
    if (s.task_kind != corpus::TaskKind::dialogue) {
        throw FilterError("clean_dialogue_response requires a dialogue sample, got " + s.id);
    }
    std::string prompt = prompts::render(prompt_template, {{"response", s.answer.value_or("")}});
    std::string reply = client::chat_with_retry(cl, {{"user", prompt, {}}}, retry);
    std::string trimmed = text::trim(reply);
    if (trimmed.rfind(kPrefix, 0) != 0) {
        throw FilterError("cleaned response for " + s.id + " lacks the \"Revised response:\" prefix");
    }
    corpus::Sample out = s;
    out.answer = text::trim(trimmed.substr(kPrefix.size()));
    return out;
}

std::pair<corpus::DatasetManifest, FilterReport> run_pipeline(
    const corpus::DatasetManifest& m, const std::vector<std::string>& stages,
    const PipelineOptions& opts) {
    for (const std::string& stage : stages) {
        if (stage != "image_size" && stage != "caption_length" && stage != "dialogue_clean") {
            throw FilterError("unknown filter stage: " + stage);
        }
        if (stage == "dialogue_clean" && opts.dialogue_client == nullptr) {
            throw FilterError("dialogue_clean stage requires a configured client");
        }
    }

    corpus::DatasetManifest cur = m;
    FilterReport report;
    report.input_count = m.samples.size();
    report.kept_count = m.samples.size();
    for (const std::string& stage : stages) {
        if (stage == "image_size") {
            auto [next, r] = filter_image_size(cur, opts.min_dim);
            cur = std::move(next);
            report.merge(r);
        } else if (stage == "caption_length") {
            auto [next, r] = filter_caption_length(cur, opts.min_tok, opts.max_tok);
            cur = std::move(next);
            report.merge(r);
        } else {
            // dialogue_clean: fail-closed, a sample never passes through uncleaned.
            corpus::DatasetManifest next;
            next.name = cur.name;
            FilterReport r;
            r.input_count = cur.samples.size();
            for (const corpus::Sample& s : cur.samples) {
                if (s.task_kind != corpus::TaskKind::dialogue) {
                    next.samples.push_back(s);
                    continue;
                }
                try {
                    next.samples.push_back(clean_dialogue_response(s, *opts.dialogue_client,
                                                                   opts.dialogue_prompt, opts.retry));
                } catch (const std::exception&) {
                    r.removals.emplace_back(s.id, "dialogue_clean");
                }
            }
            r.kept_count = next.samples.size();
            r.removed_count = r.removals.size();
            cur = std::move(next);
            report.merge(r);
        }
    }
    report.kept_count = cur.samples.size();
    report.removed_count = report.removals.size();
    return {std::move(cur), std::move(report)};
}

}  // namespace medforge::filters
