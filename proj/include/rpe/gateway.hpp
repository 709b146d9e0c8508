#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpe/text_metrics.hpp"

namespace rpe {

struct GenerationParams {
    std::string model_id = "gpt-3.5-turbo";
    double temperature = 1.0;
    int max_tokens = 512;
    std::optional<std::int64_t> seed;
};

/// The n responses obtained by submitting one prompt n times.
struct AnswerSet {
    std::string prompt_text;
    std::vector<std::string> answers;  // generation order, answers[i] is sample i
    GenerationParams params;

    int n() const { return static_cast<int>(answers.size()); }
};

/// Content address of one backend response. Equal inputs produce equal
/// digests; any field change produces a different digest.
struct CacheKey {
    std::string digest;

    static CacheKey for_completion(const std::string& backend_id, const GenerationParams& params,
                                   const std::string& prompt_text, int sample_index);
    static CacheKey for_embedding(const std::string& backend_id, const std::string& model_id,
                                  const std::string& text);
};

/// Append-only store: one UTF-8 file per digest, value is the exact
/// response text. Concurrent readers and writers of distinct keys are fine;
/// rewriting a key with identical content is idempotent.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> lookup(const CacheKey& key) const;
    void store(const CacheKey& key, const std::string& value);

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, std::string> memo_;
};

/// Uniform view of a text-completion + embedding backend. Implementations
/// must be safe to call from multiple threads.
class Backend {
public:
    virtual ~Backend() = default;

    /// Stable identifier, mixed into cache keys.
    virtual std::string id() const = 0;

    /// One completion of `prompt`; sample_index distinguishes repeated draws.
    virtual std::string complete(const std::string& prompt, const GenerationParams& params,
                                 int sample_index) = 0;

    virtual EmbeddingVector embed(const std::string& text, const std::string& model_id) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_delay{1000};
    double backoff_factor = 2.0;
};

struct GatewayOptions {
    std::string cache_dir;  // empty disables caching
    int parallelism = 1;
    RetryPolicy retry;
    /// Injectable for tests; defaults to a real sleep.
    std::function<void(std::chrono::milliseconds)> sleeper;
};

/// Front door for all model access: caching, bounded retries and request
/// accounting around a Backend.
class Gateway {
public:
    Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

    /// Exactly n answers for the prompt, answers[i] from sample_index i.
    AnswerSet generate(const std::string& prompt, const GenerationParams& params, int n);

    /// Single completion (sample_index 0 of generate).
    std::string complete_one(const std::string& prompt, const GenerationParams& params);

    EmbeddingVector embed(const std::string& text, const std::string& model_id);

    /// Number of calls that actually reached the backend (cache misses).
    std::uint64_t backend_calls() const { return backend_calls_.load(); }
    std::uint64_t cache_hits() const { return cache_hits_.load(); }

    int parallelism() const { return options_.parallelism; }
    Backend& backend() { return *backend_; }

private:
    std::string fetch_completion(const std::string& prompt, const GenerationParams& params,
                                 int sample_index);
    std::string call_with_retry(const std::function<std::string()>& call);

    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::unique_ptr<ResponseCache> cache_;
    std::atomic<std::uint64_t> backend_calls_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
};

/// Runs fn(0..count-1), using up to `parallelism` worker threads when
/// parallelism > 1. The first exception (lowest index wins) is rethrown
/// after all workers finish, so partial side effects stay observable.
void parallel_for_indexed(int count, int parallelism, const std::function<void(int)>& fn);

}  // namespace rpe
