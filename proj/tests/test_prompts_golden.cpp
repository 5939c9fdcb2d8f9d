#include "doctest.h"

#include <filesystem>
#include <set>

#include "helpers.hpp"
#include "medforge/prompts.hpp"

using namespace medforge;
namespace fs = std::filesystem;

namespace {

std::set<std::string> list_files(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) names.insert(entry.path().filename().string());
    return names;
}

}  // namespace

TEST_CASE("shipped prompt and template assets byte-match their golden copies") {
    fs::path assets = fs::path(testutil::source_dir()) / "assets";
    fs::path golden = fs::path(testutil::source_dir()) / "tests" / "golden";
    for (const std::string& sub : {"prompts", "templates"}) {
        auto shipped = list_files(assets / sub);
        auto frozen = list_files(golden / sub);
        // Same file set: an added or dropped asset is a contract change too.
        CHECK(shipped == frozen);
        for (const auto& name : frozen) {
            INFO(sub << "/" << name);
            CHECK(testutil::read_file(assets / sub / name) ==
                  testutil::read_file(golden / sub / name));
        }
    }
}

TEST_CASE("judge prompt pins the flag convention") {
    prompts::Prompts p(testutil::source_dir() + "/assets");
    auto judge = p.get("prompts/llm_judge.txt");
    CHECK(judge.find("0 represents correct, 1 represents incorrect") !=
          std::string::npos);
    CHECK(judge.find("{question}") != std::string::npos);
    CHECK(judge.find("{answer}") != std::string::npos);
    CHECK(judge.find("{response}") != std::string::npos);
}

TEST_CASE("render substitutes known keys and leaves unknown placeholders intact") {
    CHECK(prompts::render("Q: {question} A: {answer}",
                          {{"question", "what?"}, {"answer", "that"}}) ==
          "Q: what? A: that");
    CHECK(prompts::render("keep {unknown} as-is", {{"other", "x"}}) ==
          "keep {unknown} as-is");
    CHECK(prompts::render("{a}{a}", {{"a", "x"}}) == "xx");
    CHECK(prompts::render("no placeholders", {}) == "no placeholders");
}

TEST_CASE("asset lookup fails loudly on unknown paths") {
    prompts::Prompts p(testutil::source_dir() + "/assets");
    CHECK_THROWS(p.get("prompts/no_such_prompt.txt"));
}
