#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rpe/gateway.hpp"

namespace rpe {

/// Everything needed to reconstruct a run: backend selection, generation
/// parameters, inversion knobs, evaluation models and file inputs. Loadable
/// from a JSON config file; CLI flags override individual fields.
struct RunConfig {
    std::string backend = "mock";  // live | mock | synthetic
    std::string base_url = "https://api.openai.com/v1";
    std::string model_id = "gpt-3.5-turbo";
    std::string api_key_env = "RPE_API_KEY";  // falls back to OPENAI_API_KEY
    int parallelism = 1;
    std::string cache_dir;  // empty disables the response cache

    double temperature = 1.0;
    int max_tokens = 512;
    std::int64_t seed = 0;

    int n = 5;
    int m = 5;
    int k = 3;
    std::string variant = "ga";

    std::vector<std::string> embedding_models;  // empty -> backend default
    std::string template_file;                  // empty -> built-in defaults
    std::string mock_script;                    // JSON script for the mock backend
    bool mock_strict = true;

    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    GenerationParams generation_params() const;

    /// The embedding models to evaluate with: the configured list, or the
    /// backend's natural default (the offline hash embedder for mock and
    /// synthetic, the two hosted embedding models for live).
    std::vector<std::string> effective_embedding_models() const;
};

/// Builds the configured backend. Live backends read the API credential
/// from the configured environment variable.
std::shared_ptr<Backend> make_backend(const RunConfig& config);

/// Backend plus cache/retry/parallelism wiring.
Gateway make_gateway(const RunConfig& config);

}  // namespace rpe
