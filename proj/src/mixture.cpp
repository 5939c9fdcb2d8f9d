#include "medforge/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "medforge/eval.hpp"
#include "medforge/rng.hpp"
#include "medforge/text.hpp"

namespace medforge::mixture {

namespace {

bool is_binary_answer(const corpus::Sample& s) {
    if (!s.answer) return false;
    std::string n = text::normalize(*s.answer);
    return n == "yes" || n == "no";
}

// Keeps `k` elements of `items` chosen by the rng, preserving input order.
template <typename T>
std::vector<T> keep_sampled(const std::vector<T>& items, std::size_t k, Rng& rng) {
    if (k >= items.size()) return items;
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t idx : rng.sample_indices(items.size(), k)) out.push_back(items[idx]);
    return out;
}

}  // namespace

corpus::DatasetManifest build_mixture_from(
    const std::vector<std::pair<corpus::DatasetManifest, std::optional<std::size_t>>>&
        entries,
    const std::map<corpus::Modality, std::size_t>& modality_caps, std::uint64_t seed) {
    Rng rng(seed);
    corpus::DatasetManifest out;
    out.name = "mixture";
    for (const auto& [manifest, cap] : entries) {
        std::size_t take = cap ? std::min(*cap, manifest.samples.size())
                               : manifest.samples.size();
        auto kept = keep_sampled(manifest.samples, take, rng);
        out.samples.insert(out.samples.end(), kept.begin(), kept.end());
    }
    if (!modality_caps.empty()) {
        std::map<corpus::Modality, std::size_t> seen;
        std::vector<corpus::Sample> capped;
        capped.reserve(out.samples.size());
        // Per-modality reservoir is unnecessary: a deterministic prefix under
        // the cap keeps the result stable across runs.
        for (auto& s : out.samples) {
            corpus::Modality m = s.modality.value_or(corpus::Modality::other);
            auto it = modality_caps.find(m);
            if (it != modality_caps.end() && seen[m] >= it->second) continue;
            ++seen[m];
            capped.push_back(std::move(s));
        }
        out.samples = std::move(capped);
    }
    return out;
}

corpus::DatasetManifest build_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    std::vector<std::pair<corpus::DatasetManifest, std::optional<std::size_t>>> entries;
    entries.reserve(spec.entries.size());
    for (const auto& e : spec.entries)
        entries.emplace_back(corpus::load_manifest(e.manifest_path), e.cap);
    return build_mixture_from(entries, spec.modality_caps, seed);
}

corpus::Sample mcq_to_open(const corpus::Sample& s, std::size_t max_answer_tokens) {
    if (s.task_kind != corpus::TaskKind::vqa_mcq) return s;
    if (!s.answer || corpus::count_tokens(*s.answer) > max_answer_tokens) return s;
    corpus::Sample out = s;
    out.task_kind = corpus::TaskKind::vqa_open;
    out.options.reset();
    return out;
}

corpus::DatasetManifest build_rl_dataset(
    const std::vector<corpus::DatasetManifest>& manifests, std::uint64_t seed,
    const RlOptions& opts) {
    std::vector<corpus::Sample> all;
    for (const auto& m : manifests)
        all.insert(all.end(), m.samples.begin(), m.samples.end());
    if (all.empty()) throw MixtureError("build_rl_dataset: empty input");

    for (auto& s : all) s = mcq_to_open(s, opts.max_answer_tokens);

    std::vector<corpus::Sample> mcq, open_binary, open_other;
    for (auto& s : all) {
        if (s.task_kind == corpus::TaskKind::vqa_mcq)
            mcq.push_back(std::move(s));
        else if (is_binary_answer(s))
            open_binary.push_back(std::move(s));
        else
            open_other.push_back(std::move(s));
    }

    double frac = opts.target_binary_frac;
    std::size_t m = mcq.size(), on = open_other.size(), b = open_binary.size();
    // Joint fixed point of the binary-fraction bound and the MCQ share band;
    // each step only shrinks a count, so this converges in a few iterations.
    for (int iter = 0; iter < 8; ++iter) {
        std::size_t prev_m = m, prev_on = on, prev_b = b;
        if (frac < 1.0) {
            auto b_max = static_cast<std::size_t>(
                std::floor(frac * static_cast<double>(m + on) / (1.0 - frac)));
            b = std::min(b, b_max);
        }
        std::size_t total = m + on + b;
        if (m > 0 && total > 0) {
            double share = static_cast<double>(m) / static_cast<double>(total);
            if (share > opts.balance_high && opts.balance_high < 1.0) {
                m = std::min(m, static_cast<std::size_t>(std::floor(
                                    opts.balance_high / (1.0 - opts.balance_high) *
                                    static_cast<double>(on + b))));
            } else if (share < opts.balance_low && on > 0 && opts.balance_low > 0.0) {
                double open_cap =
                    std::floor(static_cast<double>(m) * (1.0 - opts.balance_low) /
                               opts.balance_low);
                std::size_t cap = open_cap <= static_cast<double>(b)
                                      ? 0
                                      : static_cast<std::size_t>(open_cap) - b;
                on = std::min(on, cap);
            }
        }
        if (m == prev_m && on == prev_on && b == prev_b) break;
    }

    Rng rng(seed);
    auto kept_b = keep_sampled(open_binary, b, rng);
    auto kept_m = keep_sampled(mcq, m, rng);
    auto kept_on = keep_sampled(open_other, on, rng);

    corpus::DatasetManifest out;
    out.name = "rl_dataset";
    out.samples.reserve(kept_b.size() + kept_m.size() + kept_on.size());
    for (auto& s : kept_m) out.samples.push_back(std::move(s));
    for (auto& s : kept_on) out.samples.push_back(std::move(s));
    for (auto& s : kept_b) out.samples.push_back(std::move(s));
    return out;
}

namespace {

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = s.find(needle); pos != std::string::npos;
         pos = s.find(needle, pos + needle.size()))
        ++count;
    return count;
}

}  // namespace

int format_reward(const std::string& response) {
    for (const char* tag : {"<think>", "</think>", "<answer>", "</answer>"})
        if (count_occurrences(response, tag) != 1) return 0;
    auto t_open = response.find("<think>");
    auto t_close = response.find("</think>");
    auto a_open = response.find("<answer>");
    auto a_close = response.find("</answer>");
    if (!(t_open < t_close && t_close < a_open && a_open < a_close)) return 0;
    if (!text::trim(response.substr(0, t_open)).empty()) return 0;
    if (!text::trim(response.substr(t_close + 8, a_open - t_close - 8)).empty()) return 0;
    if (!text::trim(response.substr(a_close + 9)).empty()) return 0;
    return 1;
}

int accuracy_reward(const std::string& response, const corpus::Sample& gt) {
    if (!gt.answer) return 0;
    std::string extracted = response;
    auto a_open = response.find("<answer>");
    auto a_close = response.find("</answer>");
    if (a_open != std::string::npos && a_close != std::string::npos && a_open < a_close)
        extracted = response.substr(a_open + 8, a_close - a_open - 8);
    extracted = text::trim(extracted);

    if (gt.task_kind == corpus::TaskKind::vqa_mcq && gt.options && !gt.options->empty()) {
        std::size_t idx = eval::extract_mcq_answer(extracted, *gt.options);
        return text::normalize((*gt.options)[idx]) == text::normalize(*gt.answer) ? 1 : 0;
    }
    return text::normalize(extracted) == text::normalize(*gt.answer) ? 1 : 0;
}

double total_reward(const std::string& response, const corpus::Sample& gt,
                    const RewardConfig& cfg) {
    return cfg.format_weight * format_reward(response) +
           cfg.accuracy_weight * accuracy_reward(response, gt);
}

}  // namespace medforge::mixture
