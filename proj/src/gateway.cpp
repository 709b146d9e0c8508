#include "rpe/gateway.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"
#include "rpe/hashing.hpp"

namespace rpe {

namespace {

nlohmann::json seed_json(const std::optional<std::int64_t>& seed) {
    if (seed) return *seed;
    return nullptr;
}

}  // namespace

CacheKey CacheKey::for_completion(const std::string& backend_id, const GenerationParams& params,
                                  const std::string& prompt_text, int sample_index) {
    nlohmann::json key = {backend_id,         params.model_id, prompt_text,
                          params.temperature, params.max_tokens, seed_json(params.seed),
                          sample_index};
    return CacheKey{sha256_hex(key.dump())};
}

CacheKey CacheKey::for_embedding(const std::string& backend_id, const std::string& model_id,
                                 const std::string& text) {
    nlohmann::json key = {backend_id, "embed", model_id, text};
    return CacheKey{sha256_hex(key.dump())};
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
    {
        std::lock_guard lock(mutex_);
        auto it = memo_.find(key.digest);
        if (it != memo_.end()) return it->second;
    }
    const auto path = dir_ / key.digest;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string value = buf.str();
    std::lock_guard lock(mutex_);
    memo_.emplace(key.digest, value);
    return value;
}

void ResponseCache::store(const CacheKey& key, const std::string& value) {
    {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = memo_.emplace(key.digest, value);
        if (!inserted) return;  // already written this run
    }
    // Write-then-rename keeps concurrent writers of the same key idempotent.
    const auto final_path = dir_ / key.digest;
    if (std::filesystem::exists(final_path)) return;
    std::ostringstream tmp_name;
    tmp_name << key.digest << ".tmp." << std::this_thread::get_id();
    const auto tmp_path = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cache: cannot write " + tmp_path.string());
        out << value;
    }
    std::filesystem::rename(tmp_path, final_path);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
    if (!backend_) throw ConfigError("gateway: null backend");
    if (options_.parallelism < 1) options_.parallelism = 1;
    if (!options_.cache_dir.empty()) {
        cache_ = std::make_unique<ResponseCache>(options_.cache_dir);
    }
    if (!options_.sleeper) {
        options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

std::string Gateway::call_with_retry(const std::function<std::string()>& call) {
    auto delay = options_.retry.initial_delay;
    std::string last_error;
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
        try {
            return call();
        } catch (const RetryableBackendError& e) {
            last_error = e.what();
            if (attempt == options_.retry.max_attempts) break;
            options_.sleeper(delay);
            delay = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(delay.count()) * options_.retry.backoff_factor));
        }
    }
    throw BackendUnavailableError("backend unavailable after " +
                                  std::to_string(options_.retry.max_attempts) +
                                  " attempts: " + last_error);
}

std::string Gateway::fetch_completion(const std::string& prompt, const GenerationParams& params,
                                      int sample_index) {
    const CacheKey key = CacheKey::for_completion(backend_->id(), params, prompt, sample_index);
    if (cache_) {
        if (auto hit = cache_->lookup(key)) {
            cache_hits_.fetch_add(1);
            return *hit;
        }
    }
    const std::string value = call_with_retry([&] {
        backend_calls_.fetch_add(1);
        return backend_->complete(prompt, params, sample_index);
    });
    if (cache_) cache_->store(key, value);
    return value;
}

AnswerSet Gateway::generate(const std::string& prompt, const GenerationParams& params, int n) {
    if (n < 1) throw PreconditionError("generate: n must be >= 1");
    AnswerSet set;
    set.prompt_text = prompt;
    set.params = params;
    set.answers.resize(static_cast<std::size_t>(n));
    parallel_for_indexed(n, options_.parallelism, [&](int i) {
        set.answers[static_cast<std::size_t>(i)] = fetch_completion(prompt, params, i);
    });
    return set;
}

std::string Gateway::complete_one(const std::string& prompt, const GenerationParams& params) {
    return fetch_completion(prompt, params, 0);
}

EmbeddingVector Gateway::embed(const std::string& text, const std::string& model_id) {
    if (text.empty()) throw PreconditionError("embed: empty text");
    const CacheKey key = CacheKey::for_embedding(backend_->id(), model_id, text);
    if (cache_) {
        if (auto hit = cache_->lookup(key)) {
            cache_hits_.fetch_add(1);
            nlohmann::json values = nlohmann::json::parse(*hit);
            EmbeddingVector vec;
            vec.model_id = model_id;
            vec.values = values.get<std::vector<double>>();
            return vec;
        }
    }
    backend_calls_.fetch_add(1);
    EmbeddingVector vec = backend_->embed(text, model_id);
    if (cache_) cache_->store(key, nlohmann::json(vec.values).dump());
    return vec;
}

void parallel_for_indexed(int count, int parallelism, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    if (parallelism <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int workers = std::min(parallelism, count);
    std::atomic<int> next{0};
    std::mutex error_mutex;
    int error_index = count;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (i < error_index) {
                        error_index = i;
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace rpe
