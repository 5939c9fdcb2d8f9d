#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "medforge/dedup.hpp"
#include "medforge/minhash.hpp"
#include "medforge/rng.hpp"

using namespace medforge;

namespace {

corpus::Sample image_sample(const std::string& id, std::uint64_t phash, int priority = 0,
                            const std::string& dataset = "d") {
    corpus::Sample s;
    s.id = id;
    s.source_dataset = dataset;
    s.source_priority = priority;
    s.task_kind = corpus::TaskKind::caption;
    s.images.push_back(corpus::ImageRef{id + ".pnm", 100, 100, phash});
    s.answer = "caption text long enough to be plausible here";
    return s;
}

std::string random_sentence(Rng& rng, int len) {
    static const char* vocab[] = {"lesion", "mass",  "left",  "right", "lobe",
                                  "signal", "axial", "cyst",  "bone",  "dense",
                                  "margin", "focal", "acute", "mild",  "large"};
    std::string out;
    for (int i = 0; i < len; ++i) {
        if (i) out += ' ';
        out += vocab[rng.next_below(15)];
    }
    return out;
}

}  // namespace

TEST_CASE("minhash identical and disjoint texts") {
    std::string a = "the lesion is located in the left frontal lobe region";
    auto sa = dedup::minhash_signature(a);
    auto sb = dedup::minhash_signature(a);
    CHECK(sa.mins == sb.mins);
    CHECK(dedup::estimate_jaccard(sa, sb) == 1.0);

    auto sc = dedup::minhash_signature("completely different words about nothing at all here");
    CHECK(dedup::estimate_jaccard(sa, sc) == 0.0);
}

TEST_CASE("minhash estimate tracks exact jaccard within binomial tolerance") {
    // Construct shingle sets with known overlap by sharing a word prefix.
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        std::string base = random_sentence(rng, 30);
        std::string variant = base + " " + random_sentence(rng, 10);
        double exact = dedup::exact_jaccard(base, variant);
        double est = dedup::estimate_jaccard(dedup::minhash_signature(base),
                                             dedup::minhash_signature(variant));
        CHECK(std::abs(est - exact) <= 0.15);
    }
}

TEST_CASE("image dedup keeps the higher-priority copy") {
    corpus::DatasetManifest m;
    m.samples.push_back(image_sample("low", 0xABCD, 1));
    m.samples.push_back(image_sample("high", 0xABCD, 2));
    m.samples.push_back(image_sample("solo", 0x1234, 0));

    auto [kept, classes] = dedup::dedup_images(m, dedup::Scope::cross_dataset);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].members == std::vector<std::string>{"high", "low"});
    CHECK(classes[0].retained == "high");
    std::vector<std::string> ids;
    for (const auto& s : kept.samples) ids.push_back(s.id);
    CHECK(ids == std::vector<std::string>{"high", "solo"});
}

TEST_CASE("image dedup ties break by lexicographic id") {
    corpus::DatasetManifest m;
    m.samples.push_back(image_sample("zeta", 0x77, 5));
    m.samples.push_back(image_sample("alpha", 0x77, 5));
    auto [kept, classes] = dedup::dedup_images(m, dedup::Scope::cross_dataset);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].retained == "alpha");
}

TEST_CASE("within-dataset scope never groups across datasets") {
    corpus::DatasetManifest m;
    m.samples.push_back(image_sample("a1", 0x99, 0, "dsA"));
    m.samples.push_back(image_sample("b1", 0x99, 0, "dsB"));
    auto [kept_within, classes_within] =
        dedup::dedup_images(m, dedup::Scope::within_dataset);
    CHECK(classes_within.empty());
    CHECK(kept_within.samples.size() == 2);

    auto [kept_cross, classes_cross] = dedup::dedup_images(m, dedup::Scope::cross_dataset);
    CHECK(classes_cross.size() == 1);
    CHECK(kept_cross.samples.size() == 1);
}

TEST_CASE("distinct hashes pass through; chunk size never changes the result") {
    Rng rng(55);
    corpus::DatasetManifest m;
    for (int i = 0; i < 120; ++i)
        m.samples.push_back(image_sample("s" + std::to_string(i), rng.next_below(40),
                                         static_cast<int>(rng.next_below(5))));
    auto [kept_big, classes_big] = dedup::dedup_images(m, dedup::Scope::cross_dataset, 1000);
    auto [kept_small, classes_small] = dedup::dedup_images(m, dedup::Scope::cross_dataset, 1);
    CHECK(kept_big.samples == kept_small.samples);
    CHECK(classes_big.size() == classes_small.size());

    // Brute-force oracle: group by hash key, retain best member.
    std::map<std::uint64_t, std::vector<const corpus::Sample*>> groups;
    for (const auto& s : m.samples) groups[*s.images[0].phash].push_back(&s);
    std::set<std::string> expected;
    for (const auto& [hash, members] : groups) {
        const corpus::Sample* best = members[0];
        for (const auto* s : members) {
            if (s->source_priority > best->source_priority ||
                (s->source_priority == best->source_priority && s->id < best->id))
                best = s;
        }
        expected.insert(best->id);
    }
    std::set<std::string> actual;
    for (const auto& s : kept_big.samples) actual.insert(s.id);
    CHECK(actual == expected);

    // Idempotence.
    auto [again, classes_again] = dedup::dedup_images(kept_big, dedup::Scope::cross_dataset);
    CHECK(again.samples == kept_big.samples);
    CHECK(classes_again.empty());
}

TEST_CASE("text dedup removes a verbatim pair across manifests by priority") {
    corpus::DatasetManifest a, b;
    a.name = "srcA";
    b.name = "srcB";
    auto qa = testutil::make_open("a1", "what lobe shows the lesion in this scan",
                                  "left frontal lobe");
    qa.source_priority = 3;
    a.samples.push_back(qa);
    auto copy = qa;
    copy.id = "b1";
    copy.source_priority = 1;
    b.samples.push_back(copy);
    b.samples.push_back(testutil::make_open("b2", "is there a pleural effusion", "no"));

    auto [manifests, classes] = dedup::dedup_texts({a, b});
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].retained == "a1");
    CHECK(manifests[0].samples.size() == 1);
    CHECK(manifests[1].samples.size() == 1);
    CHECK(manifests[1].samples[0].id == "b2");
}

TEST_CASE("unrelated texts pass through unchanged") {
    Rng rng(11);
    corpus::DatasetManifest m;
    for (int i = 0; i < 50; ++i) {
        auto s = testutil::make_open("t" + std::to_string(i),
                                     random_sentence(rng, 12) + " " + std::to_string(i),
                                     "ans" + std::to_string(i));
        m.samples.push_back(s);
    }
    auto [manifests, classes] = dedup::dedup_texts({m});
    CHECK(classes.empty());
    CHECK(manifests[0].samples == m.samples);
}

TEST_CASE("planted near-duplicates at high jaccard are all found") {
    Rng rng(23);
    corpus::DatasetManifest m;
    std::vector<std::pair<std::string, std::string>> planted;
    for (int i = 0; i < 20; ++i) {
        std::string base = random_sentence(rng, 40);
        // One word appended: shingle jaccard ~ 36/41 ~ 0.88.
        std::string near = base + " extra";
        std::string id_a = "orig" + std::to_string(i), id_b = "near" + std::to_string(i);
        m.samples.push_back(testutil::make_open(id_a, base, "x"));
        m.samples.push_back(testutil::make_open(id_b, near, "x"));
        planted.emplace_back(id_a, id_b);
    }
    auto [manifests, classes] = dedup::dedup_texts({m});
    std::set<std::string> removed;
    for (const auto& c : classes)
        for (const auto& member : c.members)
            if (member != c.retained) removed.insert(member);
    for (const auto& [a_id, b_id] : planted) {
        bool collapsed = removed.count(a_id) || removed.count(b_id);
        CHECK(collapsed);
    }
}

TEST_CASE("class report file format") {
    auto dir = testutil::temp_dir("dedup_report");
    std::vector<dedup::DuplicateClass> classes = {
        {{"a", "b"}, "a"},
        {{"c", "d", "e"}, "e"},
    };
    auto path = (dir / "classes.tsv").string();
    dedup::write_class_report(classes, path);
    CHECK(testutil::read_file(path) == "0\ta\ta,b\n1\te\tc,d,e\n");
}
