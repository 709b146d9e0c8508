#include "rpe/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rpe/errors.hpp"

namespace rpe {

std::string to_string(ScoreVariant variant) {
    switch (variant) {
        case ScoreVariant::GA: return "GA";
        case ScoreVariant::GAm: return "GAm";
        case ScoreVariant::GAa: return "GAa";
    }
    return "GA";
}

ScoreVariant score_variant_from_string(const std::string& name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "ga") return ScoreVariant::GA;
    if (lower == "gam") return ScoreVariant::GAm;
    if (lower == "gaa") return ScoreVariant::GAa;
    throw ConfigError("unknown score variant: " + name);
}

namespace {

// Word characters: ASCII letters/digits plus any byte >= 0x80, so UTF-8
// sequences stay glued to their run.
bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

char fold(unsigned char c) {
    return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
}

}  // namespace

TokenBag tokenize(const std::string& text) {
    TokenBag bag;
    const std::size_t n = text.size();
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            ++bag.tokens[current];
            ++bag.total_count;
            current.clear();
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            current.push_back(fold(c));
        } else if (c == '\'' && !current.empty() && i + 1 < n &&
                   is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
            // Apostrophe only survives between two word characters.
            current.push_back('\'');
        } else {
            flush();
        }
    }
    flush();
    return bag;
}

RougeScore rouge1(const std::string& candidate, const std::string& reference) {
    const TokenBag cand = tokenize(candidate);
    const TokenBag ref = tokenize(reference);

    int overlap = 0;
    for (const auto& [token, count] : cand.tokens) {
        auto it = ref.tokens.find(token);
        if (it != ref.tokens.end()) overlap += std::min(count, it->second);
    }

    RougeScore score;
    score.precision = cand.total_count > 0 ? static_cast<double>(overlap) / cand.total_count : 0.0;
    score.recall = ref.total_count > 0 ? static_cast<double>(overlap) / ref.total_count : 0.0;
    const double pr = score.precision + score.recall;
    score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
    return score;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.empty() || b.values.empty()) {
        throw DegenerateInputError("cosine_similarity: empty embedding vector");
    }
    if (a.values.size() != b.values.size()) {
        throw DimensionMismatchError("cosine_similarity: dimension mismatch (" +
                                     std::to_string(a.values.size()) + " vs " +
                                     std::to_string(b.values.size()) + ")");
    }
    if (a.model_id != b.model_id) {
        throw EmbeddingModelMismatchError("cosine_similarity: embeddings from different models (" +
                                          a.model_id + " vs " + b.model_id + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw DegenerateInputError("cosine_similarity: zero-norm vector");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double combined_score(std::span<const double> per_answer, ScoreVariant variant) {
    if (per_answer.empty()) {
        throw PreconditionError("combined_score: empty score sequence");
    }
    double sum = 0.0;
    double max = per_answer[0];
    for (double s : per_answer) {
        if (s < 0.0 || s > 1.0) {
            throw PreconditionError("combined_score: score outside [0,1]: " + std::to_string(s));
        }
        sum += s;
        max = std::max(max, s);
    }
    const double mean = sum / static_cast<double>(per_answer.size());
    switch (variant) {
        case ScoreVariant::GA: return (mean + max) / 2.0;
        case ScoreVariant::GAm: return max;
        case ScoreVariant::GAa: return mean;
    }
    return (mean + max) / 2.0;
}

}  // namespace rpe
