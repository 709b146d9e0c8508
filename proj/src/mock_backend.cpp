#include "rpe/mock_backend.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"
#include "rpe/hashing.hpp"

namespace rpe {

void MockBackend::script_register(Match match, std::string pattern,
                                  std::vector<std::string> responses) {
    if (responses.empty()) throw ConfigError("mock: rule needs at least one response");
    for (const auto& rule : rules_) {
        if (rule.match == match && rule.pattern == pattern) {
            throw ConfigError("mock: duplicate pattern registered: \"" + pattern + "\"");
        }
    }
    rules_.push_back(Rule{match, std::move(pattern), std::move(responses)});
}

std::string MockBackend::complete(const std::string& prompt, const GenerationParams&,
                                  int sample_index) {
    const Rule* best = nullptr;
    for (const auto& rule : rules_) {
        const bool hit = rule.match == Match::Exact
                             ? prompt == rule.pattern
                             : prompt.find(rule.pattern) != std::string::npos;
        if (hit && (!best || rule.pattern.size() > best->pattern.size())) best = &rule;
    }
    if (!best) {
        if (strict_) {
            throw UnscriptedPromptError("mock: no script matches prompt: \"" +
                                        prompt.substr(0, 120) + (prompt.size() > 120 ? "..." : "") +
                                        "\"");
        }
        return "";
    }
    return best->responses[static_cast<std::size_t>(sample_index) % best->responses.size()];
}

EmbeddingVector MockBackend::embed(const std::string& text, const std::string& model_id) {
    return hash_embedding(text, model_id);
}

std::shared_ptr<MockBackend> MockBackend::from_script_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("mock: cannot open script file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("mock: bad script file " + path.string() + ": " + e.what());
    }
    auto backend = std::make_shared<MockBackend>(doc.value("strict", true));
    for (const auto& entry : doc.value("rules", nlohmann::json::array())) {
        const std::string match_name = entry.value("match", "substring");
        Match match;
        if (match_name == "exact") {
            match = Match::Exact;
        } else if (match_name == "substring") {
            match = Match::Substring;
        } else {
            throw ConfigError("mock: unknown match kind: " + match_name);
        }
        backend->script_register(match, entry.at("pattern").get<std::string>(),
                                 entry.at("responses").get<std::vector<std::string>>());
    }
    return backend;
}

EmbeddingVector hash_embedding(const std::string& text, const std::string& model_id,
                               std::size_t dim) {
    EmbeddingVector vec;
    vec.model_id = model_id;
    vec.values.assign(dim, 0.0);
    const TokenBag bag = tokenize(text);
    for (const auto& [token, count] : bag.tokens) {
        const std::uint64_t h = fnv1a64(token + "\x1f" + model_id);
        const std::size_t bucket = h % dim;
        const double sign = (h >> 63) ? -1.0 : 1.0;
        vec.values[bucket] += sign * count;
    }
    double norm = 0.0;
    for (double v : vec.values) norm += v * v;
    if (norm == 0.0) {
        // Tokenless input (e.g. punctuation only) still gets a valid vector.
        vec.values[fnv1a64(text) % dim] = 1.0;
        return vec;
    }
    norm = std::sqrt(norm);
    for (double& v : vec.values) v /= norm;
    return vec;
}

}  // namespace rpe
