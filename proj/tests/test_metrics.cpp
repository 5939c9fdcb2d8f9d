#include "doctest.h"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "medforge/metrics.hpp"
#include "medforge/rng.hpp"
#include "medforge/text.hpp"

using namespace medforge;
using namespace medforge::metrics;

namespace {

// Independent ROUGE-L oracle: full DP table instead of the rolling rows used
// by the implementation.
double rouge_oracle(const std::string& cand, const std::string& ref) {
    auto c = text::tokenize(cand), r = text::tokenize(ref);
    if (c.empty() || r.empty()) return 0.0;
    std::vector<std::vector<std::size_t>> dp(c.size() + 1,
                                             std::vector<std::size_t>(r.size() + 1, 0));
    for (std::size_t i = 1; i <= c.size(); ++i)
        for (std::size_t j = 1; j <= r.size(); ++j)
            dp[i][j] = c[i - 1] == r[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
    double l = static_cast<double>(dp[c.size()][r.size()]);
    if (l == 0.0) return 0.0;
    double p = l / static_cast<double>(c.size()), rec = l / static_cast<double>(r.size());
    return 2.0 * p * rec / (p + rec);
}

// Independent single-reference BLEU oracle: n-grams joined into strings.
double bleu_oracle(const std::string& cand, const std::string& ref) {
    auto c = text::tokenize(cand), r = text::tokenize(ref);
    if (c.empty()) return 0.0;
    auto grams = [](const std::vector<std::string>& t, int n) {
        std::map<std::string, int> out;
        for (std::size_t i = 0; i + n <= t.size(); ++i) {
            std::string key;
            for (int j = 0; j < n; ++j) key += t[i + j] + "\x1f";
            ++out[key];
        }
        return out;
    };
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        auto cg = grams(c, n), rg = grams(r, n);
        int total = 0, clipped = 0;
        for (const auto& [g, count] : cg) {
            total += count;
            auto it = rg.find(g);
            clipped += std::min(count, it == rg.end() ? 0 : it->second);
        }
        double prec;
        if (total == 0 || clipped == 0) {
            if (n == 1 && total > 0) return 0.0;
            prec = 1e-9;
        } else {
            prec = static_cast<double>(clipped) / total;
        }
        log_sum += std::log(prec);
    }
    double bp = c.size() < r.size()
                    ? std::exp(1.0 - static_cast<double>(r.size()) / c.size())
                    : 1.0;
    return bp * std::exp(log_sum / 4.0);
}

std::string random_sentence(Rng& rng, std::size_t len) {
    static const std::vector<std::string> kVocab = {
        "lung", "lesion", "opacity", "left", "right", "lobe", "mass",
        "the",  "a",      "shows",   "with", "mild",  "no",   "effusion"};
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        if (i) out += ' ';
        out += kVocab[rng.next_below(kVocab.size())];
    }
    return out;
}

class StubAdapter : public MetricAdapter {
public:
    explicit StubAdapter(double value) : value_(value) {}
    double score(const std::string& metric, const std::string& candidate,
                 const std::string& reference) override {
        last_metric = metric;
        last_candidate = candidate;
        last_reference = reference;
        return value_;
    }
    std::string last_metric, last_candidate, last_reference;

private:
    double value_;
};

}  // namespace

TEST_CASE("rouge-l hand values") {
    CHECK(rouge_l("the cat sat", "the cat sat") == doctest::Approx(1.0));
    CHECK(rouge_l("the cat sat", "the cat ran") == doctest::Approx(2.0 / 3.0));
    CHECK(rouge_l("completely different words", "no overlap here") == 0.0);
    CHECK(rouge_l("", "the cat") == 0.0);
    CHECK(rouge_l("the cat", "") == 0.0);
    CHECK(rouge_l("", "") == 0.0);
    // Asymmetric lengths: LCS 2, P = 2/4, R = 2/2, F = 2PR/(P+R).
    CHECK(rouge_l("the cat sat down", "the cat") ==
          doctest::Approx(2.0 * 0.5 * 1.0 / 1.5));
}

TEST_CASE("bleu hand values") {
    std::string ref = "the cat sat on a mat";
    CHECK(bleu(ref, {ref}) == doctest::Approx(1.0));
    // Clipped precisions 5/6, 3/5, 2/4, 1/3; equal lengths so no brevity penalty.
    double expected = std::pow(5.0 / 6.0 * 3.0 / 5.0 * 2.0 / 4.0 * 1.0 / 3.0, 0.25);
    CHECK(bleu("the cat sat on the mat", {ref}) == doctest::Approx(expected));
    CHECK(bleu("zebra", {ref}) == 0.0);
    CHECK(bleu("", {ref}) == 0.0);
    CHECK(bleu(ref, {}) == 0.0);
    // Brevity penalty against the closest reference length.
    double short_score = bleu("the cat", {"the cat sat"});
    double eps_part = std::exp(2.0 * std::log(1e-9) / 4.0);
    CHECK(short_score == doctest::Approx(std::exp(1.0 - 1.5) * eps_part));
    // Multiple references: clipping takes the per-gram max over all of them.
    CHECK(bleu(ref, {ref, "completely different reference text goes here"}) ==
          doctest::Approx(1.0));
}

TEST_CASE("meteor-lite hand values") {
    CHECK(meteor_lite("the cat sat", "the cat sat") == doctest::Approx(1.0));
    // Full unigram overlap but reordered: 2 chunks over 3 matches.
    double penalty = 0.5 * std::pow(2.0 / 3.0, 3.0);
    CHECK(meteor_lite("sat the cat", "the cat sat") == doctest::Approx(1.0 - penalty));
    // Suffix stemming aligns inflected forms.
    CHECK(meteor_lite("walking", "walked") == doctest::Approx(1.0));
    CHECK(meteor_lite("zebra", "the cat sat") == 0.0);
    CHECK(meteor_lite("", "x") == 0.0);
    // Precision-weighted mean: 1 match, P = 1/2, R = 1.
    double p = 0.5, r = 1.0;
    CHECK(meteor_lite("cat zebra", "cat") ==
          doctest::Approx(p * r / (0.9 * p + 0.1 * r)));
}

TEST_CASE("rouge and bleu agree with independent oracles on random pairs") {
    Rng rng(99);
    for (int i = 0; i < 50; ++i) {
        std::string cand = random_sentence(rng, 1 + rng.next_below(15));
        std::string ref = random_sentence(rng, 1 + rng.next_below(15));
        CHECK(rouge_l(cand, ref) == doctest::Approx(rouge_oracle(cand, ref)).epsilon(1e-9));
        CHECK(bleu(cand, {ref}) == doctest::Approx(bleu_oracle(cand, ref)).epsilon(1e-9));
    }
}

TEST_CASE("cider scores identity at 10 and disjoint at 0") {
    std::vector<std::string> cands = {"a ct scan of the chest",
                                      "fundus photograph of the left eye"};
    std::vector<std::vector<std::string>> refs = {{cands[0]}, {cands[1]}};
    auto scores = cider_scores(cands, refs);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(10.0));
    CHECK(scores[1] == doctest::Approx(10.0));
    CHECK(cider(cands, refs) == doctest::Approx(10.0));

    auto disjoint = cider_scores({"zebra stripes", "qq ww"}, refs);
    CHECK(disjoint[0] == doctest::Approx(0.0));
    CHECK(disjoint[1] == doctest::Approx(0.0));

    // Duplicating every item doubles N and every df equally: scores unchanged.
    std::vector<std::string> cands2 = {cands[0], cands[1], cands[0], cands[1]};
    std::vector<std::vector<std::string>> refs2 = {refs[0], refs[1], refs[0], refs[1]};
    CHECK(cider(cands2, refs2) == doctest::Approx(cider(cands, refs)));

    CHECK_THROWS_AS(cider_scores({"one"}, {}), std::invalid_argument);
}

TEST_CASE("cider averages cosine similarity over multiple references") {
    // One reference matches the candidate exactly, one is disjoint: each n-gram
    // cosine averages to 1/2, so the item scores 5.
    std::vector<std::string> cands = {"a ct scan of the chest", "unrelated filler text"};
    std::vector<std::vector<std::string>> refs = {
        {"a ct scan of the chest", "zz yy xx ww vv uu"}, {"unrelated filler text"}};
    auto scores = cider_scores(cands, refs);
    CHECK(scores[0] == doctest::Approx(5.0));
}

TEST_CASE("radcliq is reported as a reciprocal") {
    CHECK(radcliq_inverse(2.0) == doctest::Approx(0.5));
    CHECK(radcliq_inverse(0.25) == doctest::Approx(4.0));
    CHECK_THROWS_AS(radcliq_inverse(0.0), std::invalid_argument);
    CHECK_THROWS_AS(radcliq_inverse(-1.0), std::invalid_argument);
}

TEST_CASE("scale_report multiplies every field by 100 exactly once") {
    MetricReport r;
    r.rouge_l = 0.5;
    r.bleu = 0.25;
    r.meteor = 0.75;
    r.cider = 3.0;
    r.external["radcliq"] = 0.4;
    auto s = scale_report(r);
    CHECK(s.rouge_l == doctest::Approx(50.0));
    CHECK(s.bleu == doctest::Approx(25.0));
    CHECK(s.meteor == doctest::Approx(75.0));
    CHECK(s.cider == doctest::Approx(300.0));
    CHECK(s.external.at("radcliq") == doctest::Approx(40.0));
    CHECK(s.scaled);
    CHECK_THROWS_AS(scale_report(s), std::logic_error);
}

TEST_CASE("external metrics pass through the adapter, radcliq inverted") {
    StubAdapter adapter(0.8);
    CHECK(external_metric("green", "cand", "ref", adapter) == doctest::Approx(0.8));
    CHECK(adapter.last_metric == "green");
    CHECK(adapter.last_candidate == "cand");
    CHECK(adapter.last_reference == "ref");
    CHECK(external_metric("radcliq", "cand", "ref", adapter) == doctest::Approx(1.25));
}
