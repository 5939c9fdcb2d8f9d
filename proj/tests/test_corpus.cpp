#include "doctest.h"

#include "helpers.hpp"
#include "medforge/corpus.hpp"

using namespace medforge;
using testutil::make_caption;
using testutil::make_mcq;

TEST_CASE("manifest round trip preserves every field") {
    auto dir = testutil::temp_dir("corpus_roundtrip");
    corpus::DatasetManifest m;
    m.name = "demo";
    auto c = make_caption("c1", "a long enough caption with several words in it");
    c.modality = corpus::Modality::xray;
    c.meta["view"] = "PA";
    c.images[0].phash = 0xDEADBEEFULL;
    m.samples.push_back(c);
    m.samples.push_back(make_mcq("m1", "Which modality?", {"CT", "MRI"}, "CT"));
    auto o = testutil::make_open("o1", "What organ?", "liver");
    o.rationale = "step by step";
    m.samples.push_back(o);

    auto path = (dir / "m.jsonl").string();
    corpus::write_manifest(m, path);
    auto loaded = corpus::load_manifest(path);
    loaded.name = m.name;  // name is not stored per line
    CHECK(loaded.samples == m.samples);
    CHECK(loaded.schema_version == corpus::kSchemaVersion);
}

TEST_CASE("empty file loads as empty manifest and writes back empty") {
    auto dir = testutil::temp_dir("corpus_empty");
    auto path = (dir / "empty.jsonl").string();
    testutil::write_file(path, "");
    auto m = corpus::load_manifest(path);
    CHECK(m.samples.empty());
    corpus::write_manifest(m, path);
    CHECK(testutil::read_file(path).empty());
}

TEST_CASE("three samples write three lines in order") {
    auto dir = testutil::temp_dir("corpus_order");
    corpus::DatasetManifest m;
    for (const char* id : {"b", "a", "c"})
        m.samples.push_back(testutil::make_open(id, "q", "ans"));
    auto path = (dir / "m.jsonl").string();
    corpus::write_manifest(m, path);
    auto loaded = corpus::load_manifest(path);
    REQUIRE(loaded.samples.size() == 3);
    CHECK(loaded.samples[0].id == "b");
    CHECK(loaded.samples[1].id == "a");
    CHECK(loaded.samples[2].id == "c");
}

TEST_CASE("mcq answer must match exactly one option") {
    auto s = make_mcq("x", "q", {"A", "B"}, "C");
    CHECK_THROWS_WITH_AS(corpus::validate_sample(s),
                         doctest::Contains("answer"), corpus::ManifestError);
    auto dup = make_mcq("x", "q", {"A", "A"}, "A");
    CHECK_THROWS_AS(corpus::validate_sample(dup), corpus::ManifestError);
    CHECK_NOTHROW(corpus::validate_sample(make_mcq("x", "q", {"A", "B"}, "B")));
}

TEST_CASE("mcq requires options and caption requires images and answer") {
    corpus::Sample s;
    s.id = "x";
    s.task_kind = corpus::TaskKind::vqa_mcq;
    s.answer = "A";
    CHECK_THROWS_AS(corpus::validate_sample(s), corpus::ManifestError);

    corpus::Sample c;
    c.id = "y";
    c.task_kind = corpus::TaskKind::caption;
    c.answer = "text";
    CHECK_THROWS_AS(corpus::validate_sample(c), corpus::ManifestError);
}

TEST_CASE("duplicate ids rejected with line context") {
    auto dir = testutil::temp_dir("corpus_dup");
    auto path = (dir / "m.jsonl").string();
    std::string line = corpus::sample_to_json_line(testutil::make_open("same", "q", "a"));
    testutil::write_file(path, line + "\n" + line + "\n");
    CHECK_THROWS_WITH_AS(corpus::load_manifest(path), doctest::Contains("same"),
                         corpus::ManifestError);
}

TEST_CASE("parse errors carry the line number") {
    auto dir = testutil::temp_dir("corpus_badline");
    auto path = (dir / "m.jsonl").string();
    testutil::write_file(path,
                         corpus::sample_to_json_line(testutil::make_open("a", "q", "x")) +
                             "\nnot json\n");
    CHECK_THROWS_WITH_AS(corpus::load_manifest(path), doctest::Contains("m.jsonl:2:"),
                         corpus::ManifestError);
}

TEST_CASE("non UTF-8 meta cannot be encoded") {
    auto dir = testutil::temp_dir("corpus_utf8");
    corpus::DatasetManifest m;
    auto s = testutil::make_open("u", "q", "a");
    s.meta["raw"] = std::string("\xFF\xFE broken", 9);
    m.samples.push_back(s);
    CHECK_THROWS_AS(corpus::write_manifest(m, (dir / "m.jsonl").string()),
                    corpus::ManifestError);
}

TEST_CASE("unknown modality strings map to other") {
    CHECK(corpus::modality_from_string("xray") == corpus::Modality::xray);
    CHECK(corpus::modality_from_string("spect") == corpus::Modality::other);
    CHECK(corpus::modality_from_string("") == corpus::Modality::other);
    CHECK(corpus::to_string(corpus::Modality::histopathology) == "histopathology");
}
