#include "doctest.h"

#include "helpers.hpp"
#include "medforge/client.hpp"

using namespace medforge;

TEST_CASE("stub replays its queue then the fallback") {
    client::StubAnnotatorClient stub({"first", "second"}, "fallback");
    CHECK(stub.chat({{"user", "q1", {}}}) == "first");
    CHECK(stub.chat({{"user", "q2", {}}}) == "second");
    CHECK(stub.chat({{"user", "q3", {}}}) == "fallback");
    CHECK(stub.call_count() == 3);
    CHECK(stub.captured()[1][0].text == "q2");
}

TEST_CASE("stub without fallback errors when exhausted") {
    client::StubAnnotatorClient stub({"only"});
    CHECK(stub.chat({{"user", "q", {}}}) == "only");
    CHECK_THROWS_AS(stub.chat({{"user", "q", {}}}), client::ClientError);
}

TEST_CASE("retry policy retries injected failures then succeeds") {
    client::StubAnnotatorClient stub({"ok"});
    stub.fail_next(2);
    client::RetryPolicy retry{3, 1};
    CHECK(client::chat_with_retry(stub, {{"user", "q", {}}}, retry) == "ok");
    // Exhausted retries rethrow.
    client::StubAnnotatorClient dead({"never"});
    dead.fail_next(5);
    CHECK_THROWS_AS(client::chat_with_retry(dead, {{"user", "q", {}}}, retry),
                    client::ClientError);
}

TEST_CASE("fixture file provider") {
    auto dir = testutil::temp_dir("client_fixture");
    auto path = (dir / "fixture.json").string();
    testutil::write_file(path, R"({"responses": ["a", "b"], "default": "dflt"})");
    auto stub = client::StubAnnotatorClient::from_fixture_file(path);
    CHECK(stub->chat({{"user", "x", {}}}) == "a");
    CHECK(stub->chat({{"user", "x", {}}}) == "b");
    CHECK(stub->chat({{"user", "x", {}}}) == "dflt");

    auto generic = client::make_client("stub:" + path);
    CHECK(generic->chat({{"user", "x", {}}}) == "a");
}

TEST_CASE("base64 encoding") {
    CHECK(client::base64_encode("") == "");
    CHECK(client::base64_encode("f") == "Zg==");
    CHECK(client::base64_encode("fo") == "Zm8=");
    CHECK(client::base64_encode("foo") == "Zm9v");
    CHECK(client::base64_encode("foobar") == "Zm9vYmFy");
}
