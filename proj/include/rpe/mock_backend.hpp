#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rpe/gateway.hpp"

namespace rpe {

/// Scripted offline backend for deterministic end-to-end tests. Prompts are
/// matched against registered rules; responses cycle by sample_index.
class MockBackend : public Backend {
public:
    enum class Match { Exact, Substring };

    explicit MockBackend(bool strict = true) : strict_(strict) {}

    /// Registers a rule. Later generate calls whose prompt matches return
    /// `responses[sample_index % responses.size()]`. When several rules
    /// match, the longest pattern wins; equal lengths keep registration
    /// order. Registering the same (match, pattern) twice is a ConfigError.
    void script_register(Match match, std::string pattern, std::vector<std::string> responses);

    /// Loads rules from a JSON script:
    ///   {"strict": true,
    ///    "rules": [{"match": "exact"|"substring", "pattern": "...",
    ///               "responses": ["...", ...]}, ...]}
    static std::shared_ptr<MockBackend> from_script_file(const std::filesystem::path& path);

    bool strict() const { return strict_; }

    std::string id() const override { return "mock"; }
    std::string complete(const std::string& prompt, const GenerationParams& params,
                         int sample_index) override;
    EmbeddingVector embed(const std::string& text, const std::string& model_id) override;

private:
    struct Rule {
        Match match;
        std::string pattern;
        std::vector<std::string> responses;
    };

    bool strict_;
    std::vector<Rule> rules_;
};

/// Deterministic feature-hash embedding used by the offline backends. Not
/// semantic: it reflects token overlap only, and is labeled as such by the
/// backends' default model id.
EmbeddingVector hash_embedding(const std::string& text, const std::string& model_id,
                               std::size_t dim = 64);

inline constexpr const char* kOfflineEmbeddingModel = "offline-hash-64";

}  // namespace rpe
