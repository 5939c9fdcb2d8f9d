#include "medforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "medforge/text.hpp"

namespace medforge::metrics {

namespace {

using Tokens = std::vector<std::string>;

Tokens toks(const std::string& s) { return text::tokenize(s); }

std::map<Tokens, int> ngram_counts(const Tokens& t, int n) {
    std::map<Tokens, int> counts;
    if (static_cast<int>(t.size()) < n) return counts;
    for (size_t i = 0; i + n <= t.size(); ++i)
        ++counts[Tokens(t.begin() + i, t.begin() + i + n)];
    return counts;
}

size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Lightweight suffix stemmer used by meteor_lite. Longest suffix first.
std::string stem(const std::string& w) {
    static const char* suffixes[] = {"ation", "ingly", "fully", "ing", "ion",
                                     "ies",   "ied",   "est",  "ed",  "ly",
                                     "es",    "s"};
    for (const char* suf : suffixes) {
        size_t n = std::string(suf).size();
        if (w.size() > n + 2 && w.compare(w.size() - n, n, suf) == 0)
            return w.substr(0, w.size() - n);
    }
    return w;
}

}  // namespace

double rouge_l(const std::string& candidate, const std::string& reference) {
    Tokens c = toks(candidate), r = toks(reference);
    if (c.empty() || r.empty()) return 0.0;
    double lcs = static_cast<double>(lcs_length(c, r));
    if (lcs == 0.0) return 0.0;
    double p = lcs / static_cast<double>(c.size());
    double rec = lcs / static_cast<double>(r.size());
    return 2.0 * p * rec / (p + rec);
}

double bleu(const std::string& candidate, const std::vector<std::string>& references,
            int max_n) {
    Tokens c = toks(candidate);
    if (c.empty() || references.empty()) return 0.0;
    std::vector<Tokens> refs;
    refs.reserve(references.size());
    size_t closest_len = 0;
    long best_diff = -1;
    for (const auto& r : references) {
        refs.push_back(toks(r));
        long diff = std::labs(static_cast<long>(refs.back().size()) -
                              static_cast<long>(c.size()));
        if (best_diff < 0 || diff < best_diff ||
            (diff == best_diff && refs.back().size() < closest_len)) {
            best_diff = diff;
            closest_len = refs.back().size();
        }
    }

    constexpr double kEps = 1e-9;
    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        auto cand = ngram_counts(c, n);
        size_t total = 0, clipped = 0;
        for (const auto& [gram, count] : cand) {
            total += static_cast<size_t>(count);
            int max_ref = 0;
            for (const auto& r : refs) {
                auto rc = ngram_counts(r, n);
                auto it = rc.find(gram);
                if (it != rc.end()) max_ref = std::max(max_ref, it->second);
            }
            clipped += static_cast<size_t>(std::min(count, max_ref));
        }
        double prec;
        if (total == 0) {
            prec = kEps;  // candidate shorter than n
        } else if (clipped == 0) {
            if (n == 1) return 0.0;
            prec = kEps;
        } else {
            prec = static_cast<double>(clipped) / static_cast<double>(total);
        }
        log_sum += std::log(prec);
    }
    double bp = 1.0;
    if (c.size() < closest_len)
        bp = std::exp(1.0 - static_cast<double>(closest_len) / static_cast<double>(c.size()));
    return bp * std::exp(log_sum / max_n);
}

double meteor_lite(const std::string& candidate, const std::string& reference) {
    Tokens c = toks(candidate), r = toks(reference);
    if (c.empty() || r.empty()) return 0.0;

    // Greedy alignment: exact matches first, then stemmed, each reference
    // token used at most once, candidate scanned left to right.
    std::vector<int> cand_to_ref(c.size(), -1);
    std::vector<bool> ref_used(r.size(), false);
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t i = 0; i < c.size(); ++i) {
            if (cand_to_ref[i] >= 0) continue;
            for (size_t j = 0; j < r.size(); ++j) {
                if (ref_used[j]) continue;
                bool hit = pass == 0 ? c[i] == r[j] : stem(c[i]) == stem(r[j]);
                if (hit) {
                    cand_to_ref[i] = static_cast<int>(j);
                    ref_used[j] = true;
                    break;
                }
            }
        }
    }

    size_t m = 0;
    for (int v : cand_to_ref)
        if (v >= 0) ++m;
    if (m == 0) return 0.0;

    double p = static_cast<double>(m) / static_cast<double>(c.size());
    double rec = static_cast<double>(m) / static_cast<double>(r.size());
    constexpr double kAlpha = 0.9;
    double fmean = p * rec / (kAlpha * p + (1.0 - kAlpha) * rec);

    // Chunks: maximal runs of matched candidate tokens mapping to consecutive
    // reference positions.
    size_t chunks = 0;
    int prev_ref = -2;
    for (size_t i = 0; i < c.size(); ++i) {
        if (cand_to_ref[i] < 0) {
            prev_ref = -2;
            continue;
        }
        if (cand_to_ref[i] != prev_ref + 1) ++chunks;
        prev_ref = cand_to_ref[i];
    }

    double penalty = 0.0;
    if (chunks > 1) {
        constexpr double kGamma = 0.5, kBeta = 3.0;
        double frag = static_cast<double>(chunks) / static_cast<double>(m);
        penalty = kGamma * std::pow(frag, kBeta);
    }
    return fmean * (1.0 - penalty);
}

std::vector<double> cider_scores(const std::vector<std::string>& candidates,
                                 const std::vector<std::vector<std::string>>& references) {
    if (candidates.size() != references.size())
        throw std::invalid_argument("cider: candidate/reference count mismatch");
    constexpr int kMaxN = 4;
    size_t num_docs = references.size();

    // Document frequency of each n-gram across the reference sets.
    std::vector<std::map<Tokens, size_t>> df(kMaxN);
    std::vector<std::vector<std::vector<std::map<Tokens, int>>>> ref_counts;  // [item][ref][n]
    ref_counts.reserve(num_docs);
    for (const auto& refs : references) {
        std::vector<std::vector<std::map<Tokens, int>>> per_ref;
        std::vector<std::vector<std::map<Tokens, int>>> dummy;
        per_ref.reserve(refs.size());
        for (const auto& ref : refs) {
            Tokens t = toks(ref);
            std::vector<std::map<Tokens, int>> by_n;
            for (int n = 1; n <= kMaxN; ++n) by_n.push_back(ngram_counts(t, n));
            per_ref.push_back(std::move(by_n));
        }
        for (int n = 0; n < kMaxN; ++n) {
            std::map<Tokens, bool> seen;
            for (const auto& by_n : per_ref)
                for (const auto& [gram, _] : by_n[n]) seen[gram] = true;
            for (const auto& [gram, _] : seen) ++df[n][gram];
        }
        ref_counts.push_back(std::move(per_ref));
    }

    auto tfidf = [&](const std::map<Tokens, int>& counts, int n) {
        std::map<Tokens, double> vec;
        for (const auto& [gram, count] : counts) {
            auto it = df[n].find(gram);
            double d = it == df[n].end() ? 0.0 : static_cast<double>(it->second);
            double idf = std::log(static_cast<double>(std::max<size_t>(num_docs, 1)) /
                                  std::max(d, 1.0));
            vec[gram] = static_cast<double>(count) * idf;
        }
        return vec;
    };
    auto cosine = [](const std::map<Tokens, double>& a, const std::map<Tokens, double>& b) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (const auto& [gram, v] : a) {
            na += v * v;
            auto it = b.find(gram);
            if (it != b.end()) dot += v * it->second;
        }
        for (const auto& [_, v] : b) nb += v * v;
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };

    std::vector<double> scores(num_docs, 0.0);
    for (size_t i = 0; i < num_docs; ++i) {
        Tokens c = toks(candidates[i]);
        double item = 0.0;
        for (int n = 0; n < kMaxN; ++n) {
            auto cand_vec = tfidf(ngram_counts(c, n + 1), n);
            double sim = 0.0;
            for (const auto& by_n : ref_counts[i]) sim += cosine(cand_vec, tfidf(by_n[n], n));
            if (!ref_counts[i].empty()) sim /= static_cast<double>(ref_counts[i].size());
            item += sim;
        }
        scores[i] = 10.0 * item / kMaxN;
    }
    return scores;
}

double cider(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references) {
    auto scores = cider_scores(candidates, references);
    if (scores.empty()) return 0.0;
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

double radcliq_inverse(double score) {
    if (score <= 0.0)
        throw std::invalid_argument("radcliq_inverse: score must be positive");
    return 1.0 / score;
}

MetricReport scale_report(const MetricReport& r) {
    if (r.scaled) throw std::logic_error("scale_report: report already scaled");
    MetricReport out = r;
    out.rouge_l *= 100.0;
    out.bleu *= 100.0;
    out.meteor *= 100.0;
    out.cider *= 100.0;
    for (auto& [_, v] : out.external) v *= 100.0;
    out.scaled = true;
    return out;
}

HttpMetricAdapter::HttpMetricAdapter(std::string endpoint)
    : endpoint_(std::move(endpoint)) {}

double HttpMetricAdapter::score(const std::string& metric, const std::string& candidate,
                                const std::string& reference) {
    std::string host = endpoint_, path = "/score";
    auto scheme_pos = host.find("://");
    auto slash = host.find('/', scheme_pos == std::string::npos ? 0 : scheme_pos + 3);
    if (slash != std::string::npos) {
        path = host.substr(slash);
        host = host.substr(0, slash);
    }
    httplib::Client cli(host);
    nlohmann::json body = {
        {"metric", metric}, {"candidate", candidate}, {"reference", reference}};
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw std::runtime_error("metric adapter request failed for " + metric);
    auto parsed = nlohmann::json::parse(res->body);
    return parsed.at("value").get<double>();
}

double external_metric(const std::string& name, const std::string& candidate,
                       const std::string& reference, MetricAdapter& adapter) {
    double raw = adapter.score(name, candidate, reference);
    if (name == "radcliq") return radcliq_inverse(raw);
    return raw;
}

}  // namespace medforge::metrics
