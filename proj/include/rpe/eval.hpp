#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpe/corpus.hpp"
#include "rpe/engine.hpp"
#include "rpe/gateway.hpp"
#include "rpe/templates.hpp"

namespace rpe {

enum class Method {
    OneAnswerOneShot,
    FiveAnswersOneShot,
    FiveAnswersFiveShots,
    GA,
    GAm,
    GAa,
};

std::string to_string(Method method);         // "1A1S", "5A1S", "5A5S", "GA", "GAm", "GAa"
Method method_from_string(const std::string& name);  // case-insensitive

struct EvalMetrics {
    double rouge1_f1 = 0.0;
    std::map<std::string, double> cosine_by_model;  // absent on embedding failure
};

/// Scores a recovered prompt against the original: ROUGE-1 f1 (recovered as
/// candidate, original as reference) plus cosine similarity per requested
/// embedding model. An embedding failure drops that model's entry; the pair
/// still evaluates.
EvalMetrics evaluate_pair(const std::string& original, const std::string& recovered,
                          const std::vector<std::string>& embedding_models, Gateway& gateway);

/// One benchmark row.
struct ResultRecord {
    std::string prompt_id;
    Method method = Method::GA;
    std::string recovered_text;
    double rouge1_f1 = 0.0;
    std::map<std::string, double> cosine_by_model;
    std::int64_t n_backend_calls = 0;
    std::int64_t wall_time_ms = 0;
    std::optional<std::string> error;
};

struct BenchmarkConfig {
    GAConfig ga;
    std::vector<std::string> embedding_models;
};

/// Runs one method over a prompt set: per record, generate the answer set,
/// invert, evaluate. Records come back in input order; per-record failures
/// are captured in the record's error field and never abort the run. Reruns
/// against a warm cache are free of backend calls.
std::vector<ResultRecord> run_benchmark(const std::vector<PromptRecord>& records, Method method,
                                        const BenchmarkConfig& config, Gateway& gateway,
                                        const PromptTemplateSet& templates);

struct MetricStats {
    double mean = 0.0;
    double stdev = 0.0;
};

struct MethodSummary {
    int count = 0;    // contributing (non-errored) records
    int errored = 0;  // records with an error field
    MetricStats rouge1_f1;
    std::map<std::string, MetricStats> cosine_by_model;
};

struct Summary {
    std::map<std::string, MethodSummary> per_method;  // keyed by method name
    int total_records = 0;
};

/// Means and population standard deviations per method, errored records
/// excluded from the statistics but counted.
Summary aggregate(const std::vector<ResultRecord>& results);

/// Rounds to 6 decimals; metric values pass through this at serialization
/// time only.
double round6(double value);

// Line-delimited serialization (stable field names, UTF-8, one record per line).
std::string result_to_json_line(const ResultRecord& record);
ResultRecord result_from_json_line(const std::string& line);
std::string results_to_jsonl(const std::vector<ResultRecord>& results);
std::vector<ResultRecord> results_from_jsonl(const std::string& text);

std::string summary_to_json(const Summary& summary);

}  // namespace rpe
