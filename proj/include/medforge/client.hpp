#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace medforge::client {

struct ClientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string text;
    std::vector<std::string> image_bytes;  // raw bytes, base64-encoded on the wire
};

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 200;  // doubled per attempt
};

// Abstract chat-completion annotator. Implementations must be thread-safe up to
// their concurrency bound.
class AnnotatorClient {
public:
    virtual ~AnnotatorClient() = default;
    virtual std::string chat(const std::vector<ChatMessage>& messages) = 0;
    virtual int concurrency_bound() const { return 1; }
};

// POSTs the chat-completion wire format to `endpoint`; API key read from
// the MEDFORGE_API_KEY environment variable.
class HttpAnnotatorClient : public AnnotatorClient {
public:
    HttpAnnotatorClient(std::string endpoint, std::string model_name, RetryPolicy retry = {},
                        int concurrency = 4, double temperature = 0.0);
    std::string chat(const std::vector<ChatMessage>& messages) override;
    int concurrency_bound() const override { return concurrency_; }

private:
    std::string endpoint_;
    std::string model_name_;
    RetryPolicy retry_;
    int concurrency_;
    double temperature_;
};

// Deterministic stub for tests and fixture-driven runs. Replays a response
// queue and captures every request for later assertions.
class StubAnnotatorClient : public AnnotatorClient {
public:
    StubAnnotatorClient() = default;
    explicit StubAnnotatorClient(std::vector<std::string> responses,
                                 std::optional<std::string> fallback = std::nullopt);

    static std::unique_ptr<StubAnnotatorClient> from_fixture_file(const std::string& path);

    std::string chat(const std::vector<ChatMessage>& messages) override;

    void push_response(std::string r);
    void set_fallback(std::string r) { fallback_ = std::move(r); }
    void fail_next(int n) { fail_next_ = n; }

    const std::vector<std::vector<ChatMessage>>& captured() const { return captured_; }
    std::size_t call_count() const { return captured_.size(); }

private:
    std::deque<std::string> responses_;
    std::optional<std::string> fallback_;
    std::vector<std::vector<ChatMessage>> captured_;
    int fail_next_ = 0;
    std::mutex mu_;
};

// "stub:<fixture-file>" selects a stub provider; anything else is an HTTP endpoint.
std::unique_ptr<AnnotatorClient> make_client(const std::string& provider_spec,
                                             const std::string& model_name = "default");

// chat() wrapped in the retry policy; rethrows the last ClientError when exhausted.
std::string chat_with_retry(AnnotatorClient& client, const std::vector<ChatMessage>& messages,
                            const RetryPolicy& retry);

std::string base64_encode(std::string_view bytes);

}  // namespace medforge::client
