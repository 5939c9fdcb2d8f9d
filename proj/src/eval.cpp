#include "medforge/eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "medforge/text.hpp"

namespace medforge::eval {

namespace {

enum class BenchKind { mcq, closed, open, report, mixed };

const std::map<std::string, BenchKind>& registry() {
    static const std::map<std::string, BenchKind> kBenchmarks = {
        {"vqa_rad", BenchKind::mixed},     {"slake", BenchKind::mixed},
        {"pathvqa", BenchKind::mixed},     {"pmc_vqa", BenchKind::mcq},
        {"omnimedvqa", BenchKind::mcq},    {"mmmu_medical", BenchKind::mcq},
        {"medxpertqa", BenchKind::mcq},    {"medqa", BenchKind::mcq},
        {"medmcqa", BenchKind::mcq},       {"pubmedqa", BenchKind::closed},
        {"medbullets", BenchKind::mcq},    {"supergpqa_medical", BenchKind::mcq},
        {"mimic_cxr", BenchKind::report},  {"iu_xray", BenchKind::report},
        {"chexpert_plus", BenchKind::report},
    };
    return kBenchmarks;
}

bool is_yes_no(const corpus::Sample& s) {
    if (!s.answer) return false;
    std::string n = text::normalize(*s.answer);
    return n == "yes" || n == "no";
}

QuestionType derive_type(const corpus::Sample& s) {
    if (s.options && !s.options->empty()) return QuestionType::mcq;
    if (is_yes_no(s)) return QuestionType::closed;
    return QuestionType::open;
}

std::string meta_or_empty(const corpus::Sample& s, const std::string& key) {
    auto it = s.meta.find(key);
    return it == s.meta.end() ? "" : it->second;
}

bool single_letter_index(const std::string& token, std::size_t n_options,
                         std::size_t& out) {
    if (token.size() != 1) return false;
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    if (c < 'A' || c >= static_cast<char>('A' + n_options)) return false;
    out = static_cast<std::size_t>(c - 'A');
    return true;
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == ')' || s.back() == ':' ||
                          s.back() == ',' || s.back() == '*'))
        s.pop_back();
    return s;
}

std::optional<std::size_t> rule_match(const std::string& prediction,
                                      const std::vector<std::string>& options) {
    std::string trimmed = text::trim(prediction);
    std::size_t idx;

    // Exact option text after normalization.
    std::string norm = text::normalize(prediction);
    for (std::size_t i = 0; i < options.size(); ++i)
        if (!norm.empty() && norm == text::normalize(options[i])) return i;

    // The whole prediction is a lone letter (allowing trailing punctuation).
    if (single_letter_index(strip_trailing_punct(trimmed), options.size(), idx))
        return idx;

    // "Answer: X" / "the answer is X".
    std::string lower = text::to_lower_ascii(prediction);
    for (const char* marker : {"answer is", "answer:"}) {
        auto pos = lower.rfind(marker);
        if (pos == std::string::npos) continue;
        std::string rest = text::trim(prediction.substr(pos + std::string(marker).size()));
        while (!rest.empty() && (rest.front() == ':' || rest.front() == '*' ||
                                 rest.front() == '(' || rest.front() == '"'))
            rest.erase(rest.begin());
        auto word_end = rest.find_first_of(" \t\n.,)*\"");
        std::string first = rest.substr(0, word_end);
        if (single_letter_index(first, options.size(), idx)) return idx;
        std::string rest_norm = text::normalize(rest);
        for (std::size_t i = 0; i < options.size(); ++i)
            if (!rest_norm.empty() && rest_norm == text::normalize(options[i])) return i;
    }

    // Parenthesized letter anywhere: "(X)".
    for (std::size_t pos = prediction.find('('); pos != std::string::npos;
         pos = prediction.find('(', pos + 1)) {
        if (pos + 2 < prediction.size() && prediction[pos + 2] == ')' &&
            single_letter_index(prediction.substr(pos + 1, 1), options.size(), idx))
            return idx;
    }

    // Leading or trailing lone letter token.
    auto tokens = text::tokenize(prediction);
    if (!tokens.empty()) {
        if (single_letter_index(tokens.front(), options.size(), idx)) return idx;
        std::size_t last = tokens.size();
        while (last > 0 && tokens[last - 1].size() == 1 &&
               !std::isalnum(static_cast<unsigned char>(tokens[last - 1][0])))
            --last;
        if (last > 0 && single_letter_index(tokens[last - 1], options.size(), idx))
            return idx;
    }
    return std::nullopt;
}

std::size_t token_overlap(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : a) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : b) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return overlap;
}

}  // namespace

std::string to_string(QuestionType t) {
    switch (t) {
        case QuestionType::mcq: return "mcq";
        case QuestionType::closed: return "closed";
        case QuestionType::open: return "open";
        case QuestionType::report: return "report";
    }
    return "open";
}

std::vector<EvalRecord> load_benchmark(const corpus::DatasetManifest& m,
                                       const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw EvalError("unknown benchmark: " + name);
    BenchKind kind = it->second;

    std::vector<EvalRecord> records;
    records.reserve(m.samples.size());
    for (const corpus::Sample& s : m.samples) {
        EvalRecord r;
        r.benchmark = name;
        r.sample = s;
        switch (kind) {
            case BenchKind::mcq: r.question_type = QuestionType::mcq; break;
            case BenchKind::closed: r.question_type = QuestionType::closed; break;
            case BenchKind::open: r.question_type = QuestionType::open; break;
            case BenchKind::report: r.question_type = QuestionType::report; break;
            case BenchKind::mixed: r.question_type = derive_type(s); break;
        }
        if (r.question_type == QuestionType::report) {
            if (text::trim(meta_or_empty(s, "findings")).empty() &&
                text::trim(meta_or_empty(s, "impressions")).empty())
                continue;
        }
        records.push_back(std::move(r));
    }
    return records;
}

FormattedPrompt format_prompt(const EvalRecord& r, const prompts::Prompts& prompts) {
    std::map<std::string, std::string> subs = {
        {"question", r.sample.question.value_or("")}};
    std::string tpl;
    switch (r.question_type) {
        case QuestionType::mcq: {
            tpl = prompts.get("templates/eval_mcq.txt");
            std::string options;
            const auto& opts = r.sample.options.value_or(std::vector<std::string>{});
            for (std::size_t i = 0; i < opts.size(); ++i) {
                options += static_cast<char>('A' + i);
                options += ". " + opts[i];
                if (i + 1 < opts.size()) options += '\n';
            }
            subs["options"] = options;
            break;
        }
        case QuestionType::closed: tpl = prompts.get("templates/eval_closed.txt"); break;
        case QuestionType::open: tpl = prompts.get("templates/eval_open.txt"); break;
        case QuestionType::report: tpl = prompts.get("templates/eval_report.txt"); break;
    }
    FormattedPrompt out;
    out.text = prompts::render(tpl, subs);
    for (const auto& ref : r.sample.images) out.image_uris.push_back(ref.uri);
    return out;
}

ExtractResult extract_mcq_answer_ex(const std::string& prediction,
                                    const std::vector<std::string>& options) {
    if (options.empty()) throw EvalError("extract_mcq_answer: no options");
    if (auto idx = rule_match(prediction, options)) return {*idx, 1};

    auto pred_tokens = text::tokenize(text::normalize(prediction));
    std::size_t best = 0, best_overlap = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        auto opt_tokens = text::tokenize(text::normalize(options[i]));
        std::size_t overlap = token_overlap(pred_tokens, opt_tokens);
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = i;
        }
    }
    return {best, 2};
}

std::size_t extract_mcq_answer(const std::string& prediction,
                               const std::vector<std::string>& options) {
    return extract_mcq_answer_ex(prediction, options).index;
}

std::optional<JudgeVerdict> judge_open_answer(const std::string& question,
                                              const std::string& gt,
                                              const std::string& prediction,
                                              client::AnnotatorClient& judge,
                                              const prompts::Prompts& prompts) {
    std::string prompt = prompts::render(
        prompts.get("prompts/llm_judge.txt"),
        {{"question", question}, {"answer", gt}, {"response", prediction}});

    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string response;
        try {
            response = judge.chat({{"user", prompt, {}}});
        } catch (const client::ClientError&) {
            continue;
        }
        auto open = response.find("<judge>");
        auto close = response.find("</judge>");
        if (open == std::string::npos || close == std::string::npos || close < open)
            continue;
        std::string flag = text::trim(response.substr(open + 7, close - open - 7));
        if (flag != "0" && flag != "1") continue;

        JudgeVerdict v;
        v.flag = flag == "1" ? 1 : 0;
        auto topen = response.find("<think>");
        auto tclose = response.find("</think>");
        if (topen != std::string::npos && tclose != std::string::npos && topen < tclose)
            v.think = response.substr(topen + 7, tclose - topen - 7);
        return v;
    }
    return std::nullopt;
}

BenchmarkResult run_benchmark(std::vector<EvalRecord> records,
                              client::AnnotatorClient* model,
                              client::AnnotatorClient* judge,
                              const prompts::Prompts& prompts) {
    BenchmarkResult result;
    for (EvalRecord& r : records) {
        if (r.question_type == QuestionType::report) continue;  // metric-scored

        if (!r.prediction) {
            if (!model) throw EvalError("no prediction and no model client for " +
                                        r.sample.id);
            FormattedPrompt fp = format_prompt(r, prompts);
            try {
                r.prediction = model->chat({{"user", fp.text, {}}});
            } catch (const client::ClientError&) {
                ++result.client_errors;
                continue;
            }
        }

        const std::string gt = r.sample.answer.value_or("");
        switch (r.question_type) {
            case QuestionType::mcq: {
                const auto& opts = *r.sample.options;
                std::size_t idx = extract_mcq_answer(*r.prediction, opts);
                r.correct = text::normalize(opts[idx]) == text::normalize(gt);
                break;
            }
            case QuestionType::closed:
                r.correct = text::normalize(*r.prediction) == text::normalize(gt);
                break;
            case QuestionType::open: {
                if (!judge) throw EvalError("open-ended record requires a judge client");
                auto verdict = judge_open_answer(r.sample.question.value_or(""), gt,
                                                 *r.prediction, *judge, prompts);
                if (!verdict) {
                    ++result.unjudged;
                    continue;
                }
                r.judge_think = verdict->think;
                r.correct = verdict->flag == 0;
                break;
            }
            case QuestionType::report: break;
        }
        if (r.correct) {
            ++result.judged;
            if (*r.correct) ++result.correct;
        }
    }
    if (result.judged > 0)
        result.accuracy =
            static_cast<double>(result.correct) / static_cast<double>(result.judged);
    result.records = std::move(records);
    return result;
}

}  // namespace medforge::eval
