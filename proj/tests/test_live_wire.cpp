// Exercises the live backend's wire protocol against a local HTTP server:
// request shapes, auth header, retry classification. No external network.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <memory>
#include <thread>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"
#include "rpe/gateway.hpp"
#include "rpe/live_backend.hpp"

using namespace rpe;
using nlohmann::json;

namespace {

struct LocalServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    json last_completion_request;
    json last_embedding_request;
    std::string last_auth_header;
    std::atomic<int> completion_calls{0};
    std::atomic<int> fail_first{0};  // respond 500 to this many requests

    LocalServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++completion_calls;
            last_auth_header = req.get_header_value("Authorization");
            last_completion_request = json::parse(req.body);
            if (fail_first > 0) {
                --fail_first;
                res.status = 500;
                res.set_content(R"({"error":"boom"})", "application/json");
                return;
            }
            const std::string prompt =
                last_completion_request["messages"][0]["content"].get<std::string>();
            json reply = {
                {"choices",
                 json::array({json{{"message", json{{"role", "assistant"},
                                                    {"content", "reply to: " + prompt}}}}})}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
            last_embedding_request = json::parse(req.body);
            json reply = {{"data", json::array({json{{"embedding", {0.1, 0.2, 0.3}}}})}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/v1/bad/chat/completions",
                    [](const httplib::Request&, httplib::Response& res) {
                        res.status = 404;
                        res.set_content("not found", "text/plain");
                    });
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~LocalServer() {
        server.stop();
        thread.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

GatewayOptions no_sleep_options() {
    GatewayOptions options;
    options.sleeper = [](std::chrono::milliseconds) {};
    return options;
}

}  // namespace

TEST_CASE("completion request carries the chat shape and auth header") {
    LocalServer server;
    LiveBackend::Options options;
    options.base_url = server.base_url();
    options.api_key = "sk-test-123";
    auto backend = std::make_shared<LiveBackend>(options);
    Gateway gateway(backend, no_sleep_options());

    GenerationParams params;
    params.model_id = "gpt-3.5-turbo";
    params.temperature = 0.5;
    params.max_tokens = 64;
    params.seed = 9;

    const AnswerSet set = gateway.generate("hello there", params, 2);
    CHECK(set.answers[0] == "reply to: hello there");
    CHECK(set.answers[1] == "reply to: hello there");

    const json& body = server.last_completion_request;
    CHECK(body["model"] == "gpt-3.5-turbo");
    CHECK(body["temperature"] == doctest::Approx(0.5));
    CHECK(body["max_tokens"] == 64);
    CHECK(body["seed"] == 9);
    REQUIRE(body["messages"].size() == 1);
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "hello there");
    CHECK(server.last_auth_header == "Bearer sk-test-123");
    // One call per sample.
    CHECK(server.completion_calls.load() == 2);
}

TEST_CASE("5xx responses are retried until the server recovers") {
    LocalServer server;
    server.fail_first = 2;
    LiveBackend::Options options;
    options.base_url = server.base_url();
    auto backend = std::make_shared<LiveBackend>(options);
    Gateway gateway(backend, no_sleep_options());

    CHECK(gateway.complete_one("retry me", {}) == "reply to: retry me");
    CHECK(server.completion_calls.load() == 3);
}

TEST_CASE("persistent 5xx exhausts the retry budget") {
    LocalServer server;
    server.fail_first = 100;
    LiveBackend::Options options;
    options.base_url = server.base_url();
    Gateway gateway(std::make_shared<LiveBackend>(options), no_sleep_options());
    CHECK_THROWS_AS(gateway.complete_one("always failing", {}), BackendUnavailableError);
    CHECK(server.completion_calls.load() == 3);
}

TEST_CASE("4xx responses surface as remote errors with the payload") {
    LocalServer server;
    LiveBackend::Options options;
    options.base_url = server.base_url() + "/bad";
    Gateway gateway(std::make_shared<LiveBackend>(options), no_sleep_options());
    try {
        gateway.complete_one("nope", {});
        FAIL("expected RemoteError");
    } catch (const RemoteError& e) {
        CHECK(e.status() == 404);
        CHECK(e.payload() == "not found");
    }
}

TEST_CASE("unreachable host becomes backend-unavailable after retries") {
    LiveBackend::Options options;
    options.base_url = "http://127.0.0.1:9/v1";  // discard port, nothing listens
    options.timeout_seconds = 1;
    Gateway gateway(std::make_shared<LiveBackend>(options), no_sleep_options());
    CHECK_THROWS_AS(gateway.complete_one("anyone there?", {}), BackendUnavailableError);
}

TEST_CASE("embedding request and response shapes") {
    LocalServer server;
    LiveBackend::Options options;
    options.base_url = server.base_url();
    Gateway gateway(std::make_shared<LiveBackend>(options), no_sleep_options());

    const EmbeddingVector vec = gateway.embed("embed me", "text-embedding-ada-002");
    CHECK(vec.model_id == "text-embedding-ada-002");
    CHECK(vec.values == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(server.last_embedding_request["model"] == "text-embedding-ada-002");
    CHECK(server.last_embedding_request["input"] == "embed me");
}

TEST_CASE("malformed base url is rejected at construction") {
    LiveBackend::Options options;
    options.base_url = "not a url";
    CHECK_THROWS_AS(LiveBackend{options}, ConfigError);
}
