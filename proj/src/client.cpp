#include "medforge/client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace medforge::client {

using json = nlohmann::json;

std::string base64_encode(std::string_view bytes) {
    static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16 |
                     static_cast<unsigned char>(bytes[i + 1]) << 8 |
                     static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(alphabet[v >> 18]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
    }
    if (i + 1 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(alphabet[v >> 18]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16 |
                     static_cast<unsigned char>(bytes[i + 1]) << 8;
        out.push_back(alphabet[v >> 18]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

namespace {

json message_to_wire(const ChatMessage& m) {
    json parts = json::array();
    if (!m.text.empty()) parts.push_back({{"type", "text"}, {"text", m.text}});
    for (const std::string& im : m.image_bytes) {
        parts.push_back({{"type", "image_url"},
                         {"image_url", {{"url", "data:image/x-portable-anymap;base64," + base64_encode(im)}}}});
    }
    return json{{"role", m.role}, {"content", std::move(parts)}};
}

}  // namespace

HttpAnnotatorClient::HttpAnnotatorClient(std::string endpoint, std::string model_name,
                                         RetryPolicy retry, int concurrency, double temperature)
    : endpoint_(std::move(endpoint)),
      model_name_(std::move(model_name)),
      retry_(retry),
      concurrency_(concurrency),
      temperature_(temperature) {}

std::string HttpAnnotatorClient::chat(const std::vector<ChatMessage>& messages) {
    // Split endpoint into scheme://host[:port] and path.
    std::string base = endpoint_;
    std::string path = "/v1/chat/completions";
    auto scheme_end = base.find("://");
    auto path_start = base.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start != std::string::npos) {
        path = base.substr(path_start);
        base = base.substr(0, path_start);
    }

    json body;
    body["model"] = model_name_;
    body["temperature"] = temperature_;
    body["messages"] = json::array();
    for (const ChatMessage& m : messages) body["messages"].push_back(message_to_wire(m));

    httplib::Client cli(base);
    cli.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("MEDFORGE_API_KEY")) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = cli.Post(path, headers, body.dump(), "application/json");
    if (!res) throw ClientError("transport error talking to " + endpoint_);
    if (res->status != 200) {
        throw ClientError("HTTP " + std::to_string(res->status) + " from " + endpoint_);
    }
    try {
        json rj = json::parse(res->body);
        return rj.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ClientError(std::string("malformed chat-completion response: ") + e.what());
    }
}

StubAnnotatorClient::StubAnnotatorClient(std::vector<std::string> responses,
                                         std::optional<std::string> fallback)
    : responses_(responses.begin(), responses.end()), fallback_(std::move(fallback)) {}

std::unique_ptr<StubAnnotatorClient> StubAnnotatorClient::from_fixture_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ClientError("cannot open stub fixture: " + path);
    json j = json::parse(in);
    auto stub = std::make_unique<StubAnnotatorClient>();
    if (j.contains("responses")) {
        for (const auto& r : j.at("responses")) stub->responses_.push_back(r.get<std::string>());
    }
    if (j.contains("default")) stub->fallback_ = j.at("default").get<std::string>();
    return stub;
}

std::string StubAnnotatorClient::chat(const std::vector<ChatMessage>& messages) {
    std::lock_guard<std::mutex> lock(mu_);
    captured_.push_back(messages);
    if (fail_next_ > 0) {
        --fail_next_;
        throw ClientError("stub: injected failure");
    }
    if (!responses_.empty()) {
        std::string r = std::move(responses_.front());
        responses_.pop_front();
        return r;
    }
    if (fallback_) return *fallback_;
    throw ClientError("stub: response queue exhausted");
}

void StubAnnotatorClient::push_response(std::string r) {
    std::lock_guard<std::mutex> lock(mu_);
    responses_.push_back(std::move(r));
}

std::unique_ptr<AnnotatorClient> make_client(const std::string& provider_spec,
                                             const std::string& model_name) {
    if (provider_spec.rfind("stub:", 0) == 0) {
        return StubAnnotatorClient::from_fixture_file(provider_spec.substr(5));
    }
    return std::make_unique<HttpAnnotatorClient>(provider_spec, model_name);
}

std::string chat_with_retry(AnnotatorClient& client, const std::vector<ChatMessage>& messages,
                            const RetryPolicy& retry) {
    int backoff = retry.backoff_ms;
    for (int attempt = 1;; ++attempt) {
        try {
            return client.chat(messages);
        } catch (const ClientError&) {
            if (attempt >= retry.max_attempts) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
}

}  // namespace medforge::client
