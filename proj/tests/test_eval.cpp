#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "medforge/eval.hpp"
#include "medforge/prompts.hpp"

using namespace medforge;
using namespace medforge::eval;

namespace {

prompts::Prompts test_prompts() {
    return prompts::Prompts(testutil::source_dir() + "/assets");
}

corpus::Sample report_sample(const std::string& id, const std::string& findings,
                             const std::string& impressions) {
    corpus::Sample s;
    s.id = id;
    s.source_dataset = "test";
    s.task_kind = corpus::TaskKind::report;
    s.meta["findings"] = findings;
    s.meta["impressions"] = impressions;
    return s;
}

}  // namespace

TEST_CASE("benchmark registry types records and rejects unknown names") {
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_mcq("a", "q", {"x", "y"}, "x")};
    CHECK(load_benchmark(m, "medqa")[0].question_type == QuestionType::mcq);
    CHECK(load_benchmark(m, "pubmedqa")[0].question_type == QuestionType::closed);
    CHECK_THROWS_WITH_AS(load_benchmark(m, "nonexistent_bench"),
                         doctest::Contains("unknown benchmark"), EvalError);
    CHECK(load_benchmark(corpus::DatasetManifest{}, "slake").empty());
}

TEST_CASE("mixed benchmarks derive the type per sample") {
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_mcq("mcq", "q", {"x", "y"}, "x"),
                 testutil::make_open("closed", "is it enlarged?", "Yes"),
                 testutil::make_open("open", "what is shown?", "a lesion")};
    auto records = load_benchmark(m, "vqa_rad");
    REQUIRE(records.size() == 3);
    CHECK(records[0].question_type == QuestionType::mcq);
    CHECK(records[1].question_type == QuestionType::closed);
    CHECK(records[2].question_type == QuestionType::open);
}

TEST_CASE("report benchmarks drop samples with no findings and no impressions") {
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {report_sample("full", "clear lungs", "no acute disease"),
                 report_sample("findings_only", "clear lungs", ""),
                 report_sample("blank", "  ", "")};
    auto records = load_benchmark(m, "mimic_cxr");
    REQUIRE(records.size() == 2);
    CHECK(records[0].sample.id == "full");
    CHECK(records[1].sample.id == "findings_only");
    CHECK(records[0].question_type == QuestionType::report);
}

TEST_CASE("format_prompt letters the options and is deterministic") {
    auto prompts = test_prompts();
    EvalRecord r;
    r.question_type = QuestionType::mcq;
    r.sample = testutil::make_mcq("m", "Which organ is shown?",
                                  {"liver", "spleen", "kidney", "lung"}, "liver");
    r.sample.images.push_back(corpus::ImageRef{"scan.pnm", 64, 64, std::nullopt});
    auto fp = format_prompt(r, prompts);
    CHECK(fp.text.find("Which organ is shown?") != std::string::npos);
    CHECK(fp.text.find("A. liver") != std::string::npos);
    CHECK(fp.text.find("B. spleen") != std::string::npos);
    CHECK(fp.text.find("C. kidney") != std::string::npos);
    CHECK(fp.text.find("D. lung") != std::string::npos);
    REQUIRE(fp.image_uris.size() == 1);
    CHECK(fp.image_uris[0] == "scan.pnm");
    CHECK(format_prompt(r, prompts).text == fp.text);

    EvalRecord open;
    open.question_type = QuestionType::open;
    open.sample = testutil::make_open("o", "What is shown?", "a lesion");
    auto ofp = format_prompt(open, prompts);
    CHECK(ofp.text.find("What is shown?") != std::string::npos);
    CHECK(ofp.text.find("A.") == std::string::npos);
}

TEST_CASE("mcq extraction stage 1 rules") {
    std::vector<std::string> opts = {"pneumonia", "pleural effusion", "pneumothorax"};
    CHECK(extract_mcq_answer_ex("B", opts).index == 1);
    CHECK(extract_mcq_answer_ex("B", opts).stage == 1);
    CHECK(extract_mcq_answer_ex("b.", opts).index == 1);
    CHECK(extract_mcq_answer_ex("Pleural effusion.", opts).index == 1);
    CHECK(extract_mcq_answer_ex("The answer is C.", opts).index == 2);
    CHECK(extract_mcq_answer_ex("Answer: pneumonia", opts).index == 0);
    CHECK(extract_mcq_answer_ex("I would pick (C) here", opts).index == 2);
    CHECK(extract_mcq_answer_ex("C, because of the visible air", opts).index == 2);
    CHECK(extract_mcq_answer_ex("after consideration the best choice is B", opts).index ==
          1);
    CHECK(extract_mcq_answer_ex("after consideration the best choice is B", opts).stage ==
          1);
    CHECK_THROWS_AS(extract_mcq_answer_ex("x", {}), EvalError);
}

TEST_CASE("mcq extraction falls back to token overlap with low-index ties") {
    std::vector<std::string> opts = {"left upper lobe", "right lower lobe",
                                     "right upper lobe"};
    auto r = extract_mcq_answer_ex("the mass sits in the right lobe, lower part", opts);
    CHECK(r.stage == 2);
    CHECK(r.index == 1);

    // Equal overlap everywhere: the lowest index wins.
    auto tie = extract_mcq_answer_ex("lobe involvement is visible", opts);
    CHECK(tie.stage == 2);
    CHECK(tie.index == 0);

    // A letter answer never reaches stage 2.
    CHECK(extract_mcq_answer_ex("A", opts).stage == 1);
}

TEST_CASE("judge parses the verdict flag, retrying once on garbage") {
    auto prompts = test_prompts();
    client::StubAnnotatorClient good(
        {"<think>the meanings match</think><judge>0</judge>"});
    auto v = judge_open_answer("q", "gt", "pred", good, prompts);
    REQUIRE(v.has_value());
    CHECK(v->flag == 0);
    CHECK(v->think == "the meanings match");
    // The judge prompt carries question, reference and prediction.
    const std::string& sent = good.captured()[0][0].text;
    CHECK(sent.find("q") != std::string::npos);
    CHECK(sent.find("gt") != std::string::npos);
    CHECK(sent.find("pred") != std::string::npos);

    client::StubAnnotatorClient retry({"yes", "<judge>1</judge>"});
    auto v2 = judge_open_answer("q", "gt", "pred", retry, prompts);
    REQUIRE(v2.has_value());
    CHECK(v2->flag == 1);
    CHECK(retry.call_count() == 2);

    client::StubAnnotatorClient hopeless({"yes", "maybe"}, std::string("no"));
    CHECK_FALSE(judge_open_answer("q", "gt", "pred", hopeless, prompts).has_value());
    CHECK(hopeless.call_count() == 2);

    client::StubAnnotatorClient out_of_range({"<judge>2</judge>", "<judge>01</judge>"},
                                             std::string("<judge> </judge>"));
    CHECK_FALSE(judge_open_answer("q", "gt", "pred", out_of_range, prompts).has_value());
}

TEST_CASE("run_benchmark computes accuracy over judged records only") {
    auto prompts = test_prompts();
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_mcq("m1", "q", {"x", "y"}, "x"),
                 testutil::make_open("c1", "enlarged?", "yes"),
                 testutil::make_open("o1", "what?", "a lesion"),
                 testutil::make_open("o2", "what?", "a lesion")};
    auto records = load_benchmark(m, "slake");
    client::StubAnnotatorClient model({"A", "yes", "some lesion", "nothing"});
    client::StubAnnotatorClient judge({"<judge>0</judge>", "<judge>1</judge>"});
    auto result = run_benchmark(records, &model, &judge, prompts);
    CHECK(result.judged == 4);
    CHECK(result.correct == 3);
    REQUIRE(result.accuracy.has_value());
    CHECK(*result.accuracy == doctest::Approx(0.75));
    CHECK(result.unjudged == 0);
    CHECK(result.client_errors == 0);
    CHECK(result.records[0].correct == true);
    CHECK(result.records[3].correct == false);
}

TEST_CASE("mcq and closed records never consult the judge") {
    auto prompts = test_prompts();
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_mcq("m1", "q", {"x", "y"}, "y"),
                 testutil::make_open("c1", "enlarged?", "no")};
    auto records = load_benchmark(m, "vqa_rad");
    client::StubAnnotatorClient model({"B", "no"});
    client::StubAnnotatorClient judge;  // would throw if consulted
    auto result = run_benchmark(records, &model, &judge, prompts);
    CHECK(judge.call_count() == 0);
    CHECK(result.judged == 2);
    CHECK(result.correct == 2);
}

TEST_CASE("unjudged records are excluded from the accuracy denominator") {
    auto prompts = test_prompts();
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_open("o1", "what?", "a lesion"),
                 testutil::make_open("o2", "what?", "a lesion")};
    auto records = load_benchmark(m, "slake");
    client::StubAnnotatorClient model({"lesion", "lesion"});
    client::StubAnnotatorClient judge({"garbage", "still garbage"},
                                      std::string("<judge>0</judge>"));
    // First record burns both judge attempts on garbage; the retry pool then
    // serves the fallback for the second record.
    auto result = run_benchmark(records, &model, &judge, prompts);
    CHECK(result.unjudged == 1);
    CHECK(result.judged == 1);
    REQUIRE(result.accuracy.has_value());
    CHECK(*result.accuracy == doctest::Approx(1.0));

    // Nothing judged at all: accuracy stays absent rather than zero.
    client::StubAnnotatorClient model2({"lesion"});
    client::StubAnnotatorClient judge2({"junk"}, std::string("junk"));
    auto records2 = load_benchmark(
        corpus::DatasetManifest{"m", {testutil::make_open("o1", "what?", "a lesion")}},
        "slake");
    auto none = run_benchmark(records2, &model2, &judge2, prompts);
    CHECK(none.judged == 0);
    CHECK_FALSE(none.accuracy.has_value());
}

TEST_CASE("cached predictions replay without a model client") {
    auto prompts = test_prompts();
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {testutil::make_mcq("m1", "q", {"x", "y"}, "x")};
    auto records = load_benchmark(m, "medqa");
    records[0].prediction = "A";
    auto result = run_benchmark(records, nullptr, nullptr, prompts);
    CHECK(result.judged == 1);
    CHECK(result.correct == 1);

    auto fresh = load_benchmark(m, "medqa");
    CHECK_THROWS_AS(run_benchmark(fresh, nullptr, nullptr, prompts), EvalError);
}

TEST_CASE("report records pass through unadjudicated") {
    auto prompts = test_prompts();
    corpus::DatasetManifest m;
    m.name = "m";
    m.samples = {report_sample("r1", "clear lungs", "")};
    auto records = load_benchmark(m, "iu_xray");
    auto result = run_benchmark(records, nullptr, nullptr, prompts);
    CHECK(result.judged == 0);
    CHECK_FALSE(result.accuracy.has_value());
    REQUIRE(result.records.size() == 1);
    CHECK_FALSE(result.records[0].correct.has_value());
}
