#include "rpe/engine.hpp"

#include <algorithm>

#include "rpe/errors.hpp"

namespace rpe {

int best_index(const Population& pop) {
    if (pop.candidates.empty()) throw PreconditionError("best_index: empty population");
    int best = 0;
    for (int i = 1; i < static_cast<int>(pop.candidates.size()); ++i) {
        if (pop.candidates[static_cast<std::size_t>(i)].combined() >
            pop.candidates[static_cast<std::size_t>(best)].combined()) {
            best = i;
        }
    }
    return best;
}

InversionEngine::InversionEngine(Gateway& gateway, const PromptTemplateSet& templates)
    : gateway_(gateway), templates_(templates) {}

std::string InversionEngine::rpe_1a1s(const std::string& answer, const GenerationParams& params) {
    if (answer.empty()) throw PreconditionError("rpe_1a1s: empty answer");
    return gateway_.complete_one(templates_.render_infer_one(answer), params);
}

std::vector<std::string> InversionEngine::infer_candidates(const AnswerSet& answers, int m,
                                                           const GenerationParams& params) {
    if (answers.n() < 1) throw PreconditionError("infer_candidates: empty answer set");
    if (m < 1) throw PreconditionError("infer_candidates: m must be >= 1");
    const std::string query = templates_.render_infer_many(answers.answers, m);
    return gateway_.generate(query, params, m).answers;
}

Candidate InversionEngine::score_candidate(Candidate candidate, const AnswerSet& answers,
                                           ScoreVariant variant, const GenerationParams& params) {
    ScoreBreakdown breakdown;
    breakdown.per_answer.assign(static_cast<std::size_t>(answers.n()), 0.0);
    if (!candidate.text.empty()) {
        const std::string probe = gateway_.complete_one(candidate.text, params);
        candidate.probe_response = probe;
        for (std::size_t j = 0; j < answers.answers.size(); ++j) {
            breakdown.per_answer[j] = rouge1(probe, answers.answers[j]).f1;
        }
    }
    breakdown.mean = combined_score(breakdown.per_answer, ScoreVariant::GAa);
    breakdown.max = combined_score(breakdown.per_answer, ScoreVariant::GAm);
    breakdown.combined = combined_score(breakdown.per_answer, variant);
    candidate.breakdown = std::move(breakdown);
    return candidate;
}

std::string InversionEngine::rpe_5a1s(const AnswerSet& answers, const GenerationParams& params) {
    return infer_candidates(answers, 1, params).front();
}

Candidate InversionEngine::rpe_5a5s(const AnswerSet& answers, int m, ScoreVariant variant,
                                    const GenerationParams& params) {
    GAConfig config;
    config.n = answers.n();
    config.m = m;
    config.k = 0;
    config.variant = variant;
    config.params = params;
    const Population pop = ga_initialize(answers, config);
    return pop.candidates[static_cast<std::size_t>(best_index(pop))];
}

Population InversionEngine::ga_initialize(const AnswerSet& answers, const GAConfig& config) {
    if (config.n < 1 || config.m < 1 || config.k < 0) {
        throw PreconditionError("ga_initialize: need n >= 1, m >= 1, k >= 0");
    }
    const std::vector<std::string> texts = infer_candidates(answers, config.m, config.params);

    Population pop;
    pop.variant = config.variant;
    pop.iteration = 0;
    pop.candidates.resize(texts.size());
    parallel_for_indexed(static_cast<int>(texts.size()), gateway_.parallelism(), [&](int i) {
        Candidate candidate;
        candidate.text = texts[static_cast<std::size_t>(i)];
        candidate.born_iteration = 0;
        pop.candidates[static_cast<std::size_t>(i)] =
            score_candidate(std::move(candidate), answers, config.variant, config.params);
    });
    return pop;
}

Population InversionEngine::ga_iterate(const Population& pop, const AnswerSet& answers,
                                       const GAConfig& config) {
    const int m = static_cast<int>(pop.candidates.size());
    std::vector<Candidate> children(static_cast<std::size_t>(m));

    // Generate and score every child before any replacement decision.
    parallel_for_indexed(m, gateway_.parallelism(), [&](int i) {
        const Candidate& parent = pop.candidates[static_cast<std::size_t>(i)];
        Candidate child;
        child.born_iteration = pop.iteration + 1;
        child.parent_index = i;
        const std::string probe = parent.probe_response.value_or("");
        const std::string diff_text = gateway_.complete_one(
            templates_.render_diff(probe, answers.answers), config.params);
        const std::string summary = gateway_.complete_one(
            templates_.render_summarize({diff_text}), config.params);
        child.text = gateway_.complete_one(
            templates_.render_mutate(parent.text, summary), config.params);
        children[static_cast<std::size_t>(i)] =
            score_candidate(std::move(child), answers, config.variant, config.params);
    });

    Population next;
    next.variant = pop.variant;
    next.iteration = pop.iteration + 1;
    next.candidates.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const Candidate& parent = pop.candidates[static_cast<std::size_t>(i)];
        Candidate& child = children[static_cast<std::size_t>(i)];
        // Pairwise elitism: the child must strictly beat its own parent.
        if (child.combined() > parent.combined()) {
            next.candidates.push_back(std::move(child));
        } else {
            next.candidates.push_back(parent);
        }
    }
    return next;
}

GAResult InversionEngine::ga_run(const AnswerSet& answers, const GAConfig& config,
                                 std::vector<Population>* trace_sink) {
    GAResult result;
    auto record = [&](const Population& pop) {
        result.trace.push_back(pop);
        if (trace_sink) trace_sink->push_back(pop);
    };

    Population pop = ga_initialize(answers, config);
    record(pop);
    for (int step = 0; step < config.k; ++step) {
        Population next = ga_iterate(pop, answers, config);
        bool replaced = false;
        for (std::size_t i = 0; i < next.candidates.size(); ++i) {
            if (next.candidates[i].born_iteration == next.iteration) {
                replaced = true;
                break;
            }
        }
        pop = std::move(next);
        record(pop);
        if (config.early_stop && !replaced) break;
    }
    result.best = pop.candidates[static_cast<std::size_t>(best_index(pop))];
    return result;
}

}  // namespace rpe
