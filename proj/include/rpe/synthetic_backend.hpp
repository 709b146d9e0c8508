#pragma once

#include <set>
#include <string>

#include "rpe/gateway.hpp"

namespace rpe {

/// Offline model whose behavior is a deterministic, invertible function of
/// the prompt, so inversion quality can be measured exactly.
///
/// A plain prompt is answered with its sorted unique keywords plus a sample
/// tag: "write two AI startup ideas" -> "ai ideas startup two write #0".
/// Queries carrying the engine's structured blocks are answered by a
/// simulated reasoner over those keyword sets: inference from one response
/// is noisy (keywords dropped, fillers hallucinated), inference from many
/// responses is less noisy, difference reports list missing/extra keywords,
/// and revisions apply a bounded number of additions/removals. Everything
/// is a pure function of (prompt, seed, sample_index).
class SyntheticBackend : public Backend {
public:
    struct Behavior {
        double infer_one_drop = 0.35;   // per-keyword drop probability, single response
        int infer_one_noise = 2;        // max hallucinated fillers, single response
        double infer_many_drop = 0.15;  // per-keyword drop probability, response set
        int infer_many_noise = 1;       // max hallucinated fillers, response set
        int revise_add_budget = 3;      // keywords adopted from a difference summary
        int revise_remove_budget = 2;   // keywords dropped per revision
    };

    SyntheticBackend() = default;
    explicit SyntheticBackend(Behavior behavior) : behavior_(behavior) {}

    std::string id() const override { return "synthetic"; }
    std::string complete(const std::string& prompt, const GenerationParams& params,
                         int sample_index) override;
    EmbeddingVector embed(const std::string& text, const std::string& model_id) override;

    /// The answer a plain prompt receives: sorted unique keywords + " #i".
    static std::string target_answer(const std::string& prompt, int sample_index);

    /// Sorted unique tokens with pure-digit tokens (sample tags) removed.
    static std::set<std::string> keywords(const std::string& text);

private:
    Behavior behavior_;
};

}  // namespace rpe
