#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpe/gateway.hpp"
#include "rpe/templates.hpp"
#include "rpe/text_metrics.hpp"

namespace rpe {

struct ScoreBreakdown {
    std::vector<double> per_answer;  // ROUGE-1 f1 of the probe vs. each answer, in order
    double mean = 0.0;
    double max = 0.0;
    double combined = 0.0;
};

/// One recovered-prompt hypothesis.
struct Candidate {
    std::string text;
    std::optional<std::string> probe_response;
    std::optional<ScoreBreakdown> breakdown;
    int born_iteration = 0;
    std::optional<int> parent_index;

    double combined() const { return breakdown ? breakdown->combined : 0.0; }
};

struct Population {
    std::vector<Candidate> candidates;
    ScoreVariant variant = ScoreVariant::GA;
    int iteration = 0;
};

/// Lowest index achieving the maximum combined score. Population must be
/// non-empty and fully scored.
int best_index(const Population& pop);

struct GAConfig {
    int n = 5;  // answers per prompt
    int m = 5;  // candidate pool size
    int k = 3;  // iterations
    ScoreVariant variant = ScoreVariant::GA;
    GenerationParams params;
    /// Stop early once an iteration replaces nothing. With deterministic
    /// backends the population is then a fixed point, so the result is
    /// unchanged; only the query budget shrinks.
    bool early_stop = false;
};

struct GAResult {
    Candidate best;
    std::vector<Population> trace;  // snapshot after init and after each iteration
};

/// The inversion method family over a gateway and a template set.
///
/// All candidate generation and scoring inside one iteration may fan out in
/// parallel (bounded by the gateway's parallelism); selection and
/// replacement happen afterwards in index order, so results are independent
/// of completion order.
class InversionEngine {
public:
    InversionEngine(Gateway& gateway, const PromptTemplateSet& templates);

    /// Infers a prompt from a single answer: one completion of the rendered
    /// single-response inference query.
    std::string rpe_1a1s(const std::string& answer, const GenerationParams& params);

    /// m candidate texts, one per sampled completion of the rendered
    /// response-set inference query. Empty completions are kept (they score
    /// 0 later) rather than treated as errors.
    std::vector<std::string> infer_candidates(const AnswerSet& answers, int m,
                                              const GenerationParams& params);

    /// Probes the candidate once, scores the probe against every answer and
    /// fills in the breakdown. Empty candidate text skips the probe and
    /// scores 0 everywhere.
    Candidate score_candidate(Candidate candidate, const AnswerSet& answers, ScoreVariant variant,
                              const GenerationParams& params);

    /// Single-inference method over the whole answer set (the m=1 special
    /// case of candidate inference).
    std::string rpe_5a1s(const AnswerSet& answers, const GenerationParams& params);

    /// Generates and scores m candidates, returns the argmax by combined
    /// score (ties keep the lowest index).
    Candidate rpe_5a5s(const AnswerSet& answers, int m, ScoreVariant variant,
                       const GenerationParams& params);

    /// Scored initial population; iteration 0, every candidate born at 0.
    Population ga_initialize(const AnswerSet& answers, const GAConfig& config);

    /// One refinement round: per candidate, difference analysis ->
    /// summary -> revision -> scored child; the child replaces its parent
    /// only on a strict combined-score improvement.
    Population ga_iterate(const Population& pop, const AnswerSet& answers, const GAConfig& config);

    /// Full run: initialize, k iterations, best of the final population.
    /// When trace_sink is given, snapshots are appended as they complete,
    /// so a failed run still leaves the partial trace behind.
    GAResult ga_run(const AnswerSet& answers, const GAConfig& config,
                    std::vector<Population>* trace_sink = nullptr);

private:
    Gateway& gateway_;
    const PromptTemplateSet& templates_;
};

}  // namespace rpe
