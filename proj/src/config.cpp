#include "rpe/config.hpp"

#include <cstdlib>
#include <fstream>

#include "rpe/errors.hpp"
#include "rpe/live_backend.hpp"
#include "rpe/mock_backend.hpp"
#include "rpe/synthetic_backend.hpp"

namespace rpe {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& doc, const char* name, T& target) {
    if (doc.contains(name)) target = doc.at(name).get<T>();
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad config file " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig config;
    read_field(doc, "backend", config.backend);
    read_field(doc, "base_url", config.base_url);
    read_field(doc, "model_id", config.model_id);
    read_field(doc, "api_key_env", config.api_key_env);
    read_field(doc, "parallelism", config.parallelism);
    read_field(doc, "cache_dir", config.cache_dir);
    read_field(doc, "temperature", config.temperature);
    read_field(doc, "max_tokens", config.max_tokens);
    read_field(doc, "seed", config.seed);
    read_field(doc, "n", config.n);
    read_field(doc, "m", config.m);
    read_field(doc, "k", config.k);
    read_field(doc, "variant", config.variant);
    read_field(doc, "embedding_models", config.embedding_models);
    read_field(doc, "template_file", config.template_file);
    read_field(doc, "mock_script", config.mock_script);
    read_field(doc, "mock_strict", config.mock_strict);
    return config;
}

json RunConfig::to_json() const {
    return json{
        {"backend", backend},
        {"base_url", base_url},
        {"model_id", model_id},
        {"api_key_env", api_key_env},
        {"parallelism", parallelism},
        {"cache_dir", cache_dir},
        {"temperature", temperature},
        {"max_tokens", max_tokens},
        {"seed", seed},
        {"n", n},
        {"m", m},
        {"k", k},
        {"variant", variant},
        {"embedding_models", embedding_models},
        {"template_file", template_file},
        {"mock_script", mock_script},
        {"mock_strict", mock_strict},
    };
}

GenerationParams RunConfig::generation_params() const {
    GenerationParams params;
    params.model_id = model_id;
    params.temperature = temperature;
    params.max_tokens = max_tokens;
    params.seed = seed;
    return params;
}

std::vector<std::string> RunConfig::effective_embedding_models() const {
    if (!embedding_models.empty()) return embedding_models;
    if (backend == "live") return {"text-embedding-ada-002", "text-embedding-3-large"};
    return {kOfflineEmbeddingModel};
}

std::shared_ptr<Backend> make_backend(const RunConfig& config) {
    if (config.backend == "mock") {
        if (!config.mock_script.empty()) return MockBackend::from_script_file(config.mock_script);
        return std::make_shared<MockBackend>(config.mock_strict);
    }
    if (config.backend == "synthetic") {
        return std::make_shared<SyntheticBackend>();
    }
    if (config.backend == "live") {
        LiveBackend::Options options;
        options.base_url = config.base_url;
        const char* key = std::getenv(config.api_key_env.c_str());
        if (!key) key = std::getenv("OPENAI_API_KEY");
        if (key) options.api_key = key;
        return std::make_shared<LiveBackend>(options);
    }
    throw ConfigError("unknown backend kind: " + config.backend +
                      " (expected live, mock or synthetic)");
}

Gateway make_gateway(const RunConfig& config) {
    GatewayOptions options;
    options.cache_dir = config.cache_dir;
    options.parallelism = config.parallelism;
    return Gateway(make_backend(config), std::move(options));
}

}  // namespace rpe
