#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace rpe {

/// Tokenizer revision. ROUGE values are only comparable between runs that
/// used the same tokenizer, so the rule set is versioned and frozen:
/// ASCII-lowercased maximal runs of letters/digits, apostrophes kept when
/// they sit inside a run, bytes >= 0x80 treated as letters, everything else
/// a separator. No stemming, no stopword removal.
inline constexpr const char* kTokenizerVersion = "unigram-v1";

/// Multiset of unigram tokens.
struct TokenBag {
    std::map<std::string, int> tokens;
    int total_count = 0;
};

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string model_id;
};

/// How a candidate's per-answer scores are folded into one scalar.
enum class ScoreVariant {
    GA,   // (mean + max) / 2
    GAm,  // max only
    GAa   // mean only
};

std::string to_string(ScoreVariant variant);
ScoreVariant score_variant_from_string(const std::string& name);

TokenBag tokenize(const std::string& text);

/// Unigram overlap between candidate and reference. Empty side -> 0 for the
/// corresponding ratio; f1 is 0 whenever precision + recall is 0.
RougeScore rouge1(const std::string& candidate, const std::string& reference);

/// dot(a,b) / (|a||b|). Throws DimensionMismatchError, DegenerateInputError
/// or EmbeddingModelMismatchError on incompatible inputs.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Folds a non-empty sequence of per-answer scores (each in [0,1]) into the
/// candidate's final score under the given variant.
double combined_score(std::span<const double> per_answer, ScoreVariant variant);

}  // namespace rpe
