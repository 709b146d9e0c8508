#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rpe/errors.hpp"
#include "rpe/gateway.hpp"
#include "rpe/mock_backend.hpp"
#include "rpe/synthetic_backend.hpp"

using namespace rpe;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rpe_gw_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Fails `failures` times with a retryable error, then echoes.
class FlakyBackend : public Backend {
public:
    explicit FlakyBackend(int failures) : remaining_(failures) {}

    std::string id() const override { return "flaky"; }

    std::string complete(const std::string& prompt, const GenerationParams&, int) override {
        if (remaining_-- > 0) throw RetryableBackendError("synthetic outage");
        return "echo:" + prompt;
    }

    EmbeddingVector embed(const std::string& text, const std::string& model_id) override {
        return hash_embedding(text, model_id);
    }

private:
    int remaining_;
};

GatewayOptions no_sleep_options(std::string cache_dir = "") {
    GatewayOptions options;
    options.cache_dir = std::move(cache_dir);
    options.sleeper = [](std::chrono::milliseconds) {};
    return options;
}

}  // namespace

TEST_CASE("mock returns scripted answers in order") {
    auto mock = std::make_shared<MockBackend>();
    mock->script_register(MockBackend::Match::Exact, "P", {"a1", "a2", "a3"});
    Gateway gateway(mock, no_sleep_options());
    const AnswerSet set = gateway.generate("P", {}, 3);
    CHECK(set.answers == std::vector<std::string>{"a1", "a2", "a3"});
    CHECK(set.prompt_text == "P");
    CHECK(set.n() == 3);
}

TEST_CASE("mock cycles responses by sample index") {
    auto mock = std::make_shared<MockBackend>();
    mock->script_register(MockBackend::Match::Exact, "Q", {"r"});
    Gateway gateway(mock, no_sleep_options());
    CHECK(gateway.generate("Q", {}, 2).answers == std::vector<std::string>{"r", "r"});

    mock->script_register(MockBackend::Match::Exact, "T", {"x", "y"});
    CHECK(gateway.generate("T", {}, 5).answers ==
          std::vector<std::string>{"x", "y", "x", "y", "x"});
}

TEST_CASE("mock substring matching and longest-literal tie break") {
    auto mock = std::make_shared<MockBackend>();
    mock->script_register(MockBackend::Match::Substring, "differences", {"diff-summary"});
    mock->script_register(MockBackend::Match::Substring, "list the differences", {"longer-wins"});
    Gateway gateway(mock, no_sleep_options());
    CHECK(gateway.complete_one("please list the differences between these", {}) == "longer-wins");
    CHECK(gateway.complete_one("any differences here?", {}) == "diff-summary");
}

TEST_CASE("strict mock rejects unscripted prompts") {
    auto mock = std::make_shared<MockBackend>();
    mock->script_register(MockBackend::Match::Exact, "known", {"ok"});
    Gateway gateway(mock, no_sleep_options());
    CHECK_THROWS_AS(gateway.complete_one("Z", {}), UnscriptedPromptError);

    auto lenient = std::make_shared<MockBackend>(false);
    Gateway lenient_gateway(lenient, no_sleep_options());
    CHECK(lenient_gateway.complete_one("Z", {}) == "");
}

TEST_CASE("duplicate script registration is a configuration error") {
    MockBackend mock;
    mock.script_register(MockBackend::Match::Exact, "p", {"r"});
    CHECK_THROWS_AS(mock.script_register(MockBackend::Match::Exact, "p", {"other"}), ConfigError);
    // Same literal under a different matcher kind is fine.
    mock.script_register(MockBackend::Match::Substring, "p", {"r2"});
}

TEST_CASE("generate validates n") {
    Gateway gateway(std::make_shared<SyntheticBackend>(), no_sleep_options());
    CHECK_THROWS_AS(gateway.generate("p", {}, 0), PreconditionError);
}

TEST_CASE("cache: second identical call reaches the backend zero times") {
    const fs::path dir = fresh_dir("roundtrip");
    auto mock = std::make_shared<MockBackend>();
    mock->script_register(MockBackend::Match::Exact, "P", {"a1", "a2", "a3"});

    Gateway first(mock, no_sleep_options(dir.string()));
    const AnswerSet a = first.generate("P", {}, 3);
    CHECK(first.backend_calls() == 3);

    // Same gateway: answered from the in-memory/file cache.
    const AnswerSet b = first.generate("P", {}, 3);
    CHECK(first.backend_calls() == 3);
    CHECK(a.answers == b.answers);

    // Fresh gateway over the same directory: zero backend calls.
    Gateway second(mock, no_sleep_options(dir.string()));
    const AnswerSet c = second.generate("P", {}, 3);
    CHECK(second.backend_calls() == 0);
    CHECK(second.cache_hits() == 3);
    CHECK(c.answers == a.answers);
}

TEST_CASE("cache keys separate params prompts and sample indices") {
    GenerationParams base;
    const CacheKey k0 = CacheKey::for_completion("mock", base, "p", 0);
    CHECK(k0.digest == CacheKey::for_completion("mock", base, "p", 0).digest);
    CHECK(k0.digest != CacheKey::for_completion("mock", base, "p", 1).digest);
    CHECK(k0.digest != CacheKey::for_completion("mock", base, "q", 0).digest);
    CHECK(k0.digest != CacheKey::for_completion("other", base, "p", 0).digest);

    GenerationParams warm = base;
    warm.temperature = 0.7;
    CHECK(k0.digest != CacheKey::for_completion("mock", warm, "p", 0).digest);

    GenerationParams seeded = base;
    seeded.seed = 7;
    CHECK(k0.digest != CacheKey::for_completion("mock", seeded, "p", 0).digest);

    GenerationParams capped = base;
    capped.max_tokens = 16;
    CHECK(k0.digest != CacheKey::for_completion("mock", capped, "p", 0).digest);
}

TEST_CASE("cache files are digest-named with exact response text") {
    const fs::path dir = fresh_dir("layout");
    ResponseCache cache(dir);
    const CacheKey key = CacheKey::for_completion("mock", {}, "hello", 0);
    cache.store(key, "response text\nwith newline");
    // Idempotent rewrite.
    cache.store(key, "response text\nwith newline");

    std::ifstream in(dir / key.digest, std::ios::binary);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "response text\nwith newline");
    CHECK(cache.lookup(key).value() == "response text\nwith newline");
    CHECK_FALSE(cache.lookup(CacheKey::for_completion("mock", {}, "other", 0)).has_value());
}

TEST_CASE("retry: flaky backend succeeds within the attempt budget") {
    int sleeps = 0;
    GatewayOptions options;
    options.sleeper = [&](std::chrono::milliseconds) { ++sleeps; };
    Gateway gateway(std::make_shared<FlakyBackend>(2), std::move(options));
    CHECK(gateway.complete_one("hi", {}) == "echo:hi");
    CHECK(sleeps == 2);
    CHECK(gateway.backend_calls() == 3);
}

TEST_CASE("retry: persistent failure becomes backend-unavailable") {
    Gateway gateway(std::make_shared<FlakyBackend>(99), no_sleep_options());
    CHECK_THROWS_AS(gateway.complete_one("hi", {}), BackendUnavailableError);
    CHECK(gateway.backend_calls() == 3);  // default attempt budget
}

TEST_CASE("synthetic target answers with sorted keywords plus sample tag") {
    Gateway gateway(std::make_shared<SyntheticBackend>(), no_sleep_options());
    const AnswerSet set = gateway.generate("write two AI startup ideas", {}, 2);
    CHECK(set.answers[0] == "ai ideas startup two write #0");
    CHECK(set.answers[1] == "ai ideas startup two write #1");
}

TEST_CASE("synthetic runs are transcript-deterministic") {
    auto run = [] {
        Gateway gateway(std::make_shared<SyntheticBackend>(), no_sleep_options());
        GenerationParams params;
        params.seed = 11;
        std::vector<std::string> transcript;
        for (const char* prompt : {"alpha beta", "gamma delta epsilon", "zeta"}) {
            for (const auto& answer : gateway.generate(prompt, params, 3).answers) {
                transcript.push_back(answer);
            }
        }
        return transcript;
    };
    CHECK(run() == run());
}

TEST_CASE("offline embedding is deterministic and input-sensitive") {
    Gateway gateway(std::make_shared<MockBackend>(), no_sleep_options());
    const EmbeddingVector a1 = gateway.embed("abc", kOfflineEmbeddingModel);
    const EmbeddingVector a2 = gateway.embed("abc", kOfflineEmbeddingModel);
    CHECK(a1.values == a2.values);

    const EmbeddingVector b = gateway.embed("abd", kOfflineEmbeddingModel);
    CHECK(a1.values != b.values);

    // Model id feeds the hash, so models disagree on the same text.
    const EmbeddingVector other = gateway.embed("abc", "offline-other");
    CHECK(a1.values != other.values);

    CHECK_THROWS_AS(gateway.embed("", kOfflineEmbeddingModel), PreconditionError);
}

TEST_CASE("embeddings round-trip through the cache") {
    const fs::path dir = fresh_dir("embed");
    auto mock = std::make_shared<MockBackend>();
    Gateway first(mock, no_sleep_options(dir.string()));
    const EmbeddingVector fresh = first.embed("some text", kOfflineEmbeddingModel);
    CHECK(first.backend_calls() == 1);

    Gateway second(mock, no_sleep_options(dir.string()));
    const EmbeddingVector cached = second.embed("some text", kOfflineEmbeddingModel);
    CHECK(second.backend_calls() == 0);
    CHECK(cached.values == fresh.values);
    CHECK(cached.model_id == fresh.model_id);
}

TEST_CASE("parallel generate matches serial output") {
    auto make = [] {
        auto backend = std::make_shared<SyntheticBackend>();
        return backend;
    };
    GatewayOptions serial = no_sleep_options();
    GatewayOptions parallel = no_sleep_options();
    parallel.parallelism = 4;

    Gateway g1(make(), std::move(serial));
    Gateway g2(make(), std::move(parallel));
    GenerationParams params;
    params.seed = 3;
    CHECK(g1.generate("orbit the bright moon", params, 8).answers ==
          g2.generate("orbit the bright moon", params, 8).answers);
}

TEST_CASE("mock script file loads rules and strictness") {
    const fs::path dir = fresh_dir("script");
    const fs::path path = dir / "script.json";
    std::ofstream(path) << R"({"strict": true, "rules": [
        {"match": "exact", "pattern": "hi", "responses": ["hello"]},
        {"match": "substring", "pattern": "are you", "responses": ["yes", "no"]}
    ]})";
    auto mock = MockBackend::from_script_file(path);
    CHECK(mock->strict());
    Gateway gateway(mock, no_sleep_options());
    CHECK(gateway.complete_one("hi", {}) == "hello");
    CHECK(gateway.generate("how are you today", {}, 2).answers ==
          std::vector<std::string>{"yes", "no"});

    std::ofstream(dir / "bad.json") << "{not json";
    CHECK_THROWS_AS(MockBackend::from_script_file(dir / "bad.json"), ConfigError);
}
