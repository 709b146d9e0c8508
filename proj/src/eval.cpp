#include "rpe/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"
#include "rpe/text_metrics.hpp"

namespace rpe {

namespace {

using nlohmann::json;

std::string recover_prompt(InversionEngine& engine, const AnswerSet& answers, Method method,
                           const BenchmarkConfig& config) {
    GAConfig ga = config.ga;
    switch (method) {
        case Method::OneAnswerOneShot:
            return engine.rpe_1a1s(answers.answers.front(), ga.params);
        case Method::FiveAnswersOneShot:
            return engine.rpe_5a1s(answers, ga.params);
        case Method::FiveAnswersFiveShots:
            return engine.rpe_5a5s(answers, ga.m, ScoreVariant::GA, ga.params).text;
        case Method::GA:
            ga.variant = ScoreVariant::GA;
            break;
        case Method::GAm:
            ga.variant = ScoreVariant::GAm;
            break;
        case Method::GAa:
            ga.variant = ScoreVariant::GAa;
            break;
    }
    return engine.ga_run(answers, ga).best.text;
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::OneAnswerOneShot: return "1A1S";
        case Method::FiveAnswersOneShot: return "5A1S";
        case Method::FiveAnswersFiveShots: return "5A5S";
        case Method::GA: return "GA";
        case Method::GAm: return "GAm";
        case Method::GAa: return "GAa";
    }
    return "GA";
}

Method method_from_string(const std::string& name) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "1a1s") return Method::OneAnswerOneShot;
    if (lower == "5a1s") return Method::FiveAnswersOneShot;
    if (lower == "5a5s") return Method::FiveAnswersFiveShots;
    if (lower == "ga") return Method::GA;
    if (lower == "gam") return Method::GAm;
    if (lower == "gaa") return Method::GAa;
    throw ConfigError("unknown method: " + name);
}

EvalMetrics evaluate_pair(const std::string& original, const std::string& recovered,
                          const std::vector<std::string>& embedding_models, Gateway& gateway) {
    if (original.empty()) throw PreconditionError("evaluate_pair: empty original prompt");
    EvalMetrics metrics;
    metrics.rouge1_f1 = rouge1(recovered, original).f1;
    for (const auto& model : embedding_models) {
        if (recovered.empty()) continue;  // nothing to embed; cosine stays absent
        try {
            const EmbeddingVector a = gateway.embed(original, model);
            const EmbeddingVector b = gateway.embed(recovered, model);
            metrics.cosine_by_model[model] = cosine_similarity(a, b);
        } catch (const std::exception&) {
            // Embedding trouble must not sink the record; this model's
            // cosine is simply absent.
        }
    }
    return metrics;
}

std::vector<ResultRecord> run_benchmark(const std::vector<PromptRecord>& records, Method method,
                                        const BenchmarkConfig& config, Gateway& gateway,
                                        const PromptTemplateSet& templates) {
    if (records.empty()) throw PreconditionError("run_benchmark: empty prompt set");
    InversionEngine engine(gateway, templates);

    std::vector<ResultRecord> results;
    results.reserve(records.size());
    for (const auto& record : records) {
        const auto start = std::chrono::steady_clock::now();
        const std::uint64_t calls_before = gateway.backend_calls();

        ResultRecord row;
        row.prompt_id = record.id;
        row.method = method;
        try {
            const AnswerSet answers =
                gateway.generate(record.text, config.ga.params, config.ga.n);
            row.recovered_text = recover_prompt(engine, answers, method, config);
            const EvalMetrics metrics =
                evaluate_pair(record.text, row.recovered_text, config.embedding_models, gateway);
            row.rouge1_f1 = metrics.rouge1_f1;
            row.cosine_by_model = metrics.cosine_by_model;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.n_backend_calls =
            static_cast<std::int64_t>(gateway.backend_calls() - calls_before);
        row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        results.push_back(std::move(row));
    }
    return results;
}

Summary aggregate(const std::vector<ResultRecord>& results) {
    struct Accumulator {
        std::vector<double> rouge;
        std::map<std::string, std::vector<double>> cosine;
        int errored = 0;
    };
    std::map<std::string, Accumulator> buckets;
    for (const auto& row : results) {
        Accumulator& acc = buckets[to_string(row.method)];
        if (row.error) {
            ++acc.errored;
            continue;
        }
        acc.rouge.push_back(row.rouge1_f1);
        for (const auto& [model, value] : row.cosine_by_model) acc.cosine[model].push_back(value);
    }

    auto stats_of = [](const std::vector<double>& values) {
        MetricStats stats;
        if (values.empty()) return stats;
        double sum = 0.0;
        for (double v : values) sum += v;
        stats.mean = sum / static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values) var += (v - stats.mean) * (v - stats.mean);
        stats.stdev = std::sqrt(var / static_cast<double>(values.size()));
        return stats;
    };

    Summary summary;
    summary.total_records = static_cast<int>(results.size());
    for (const auto& [name, acc] : buckets) {
        MethodSummary ms;
        ms.count = static_cast<int>(acc.rouge.size());
        ms.errored = acc.errored;
        ms.rouge1_f1 = stats_of(acc.rouge);
        for (const auto& [model, values] : acc.cosine) ms.cosine_by_model[model] = stats_of(values);
        summary.per_method[name] = ms;
    }
    return summary;
}

double round6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return std::strtod(buf, nullptr);
}

std::string result_to_json_line(const ResultRecord& record) {
    json cosine = json::object();
    for (const auto& [model, value] : record.cosine_by_model) cosine[model] = round6(value);
    json obj = {
        {"prompt_id", record.prompt_id},
        {"method", to_string(record.method)},
        {"recovered_text", record.recovered_text},
        {"rouge1_f1", round6(record.rouge1_f1)},
        {"cosine_by_model", cosine},
        {"n_backend_calls", record.n_backend_calls},
        {"wall_time_ms", record.wall_time_ms},
    };
    if (record.error) obj["error"] = *record.error;
    return obj.dump();
}

ResultRecord result_from_json_line(const std::string& line) {
    json obj = json::parse(line);
    ResultRecord record;
    record.prompt_id = obj.at("prompt_id").get<std::string>();
    record.method = method_from_string(obj.at("method").get<std::string>());
    record.recovered_text = obj.at("recovered_text").get<std::string>();
    record.rouge1_f1 = obj.at("rouge1_f1").get<double>();
    for (const auto& [model, value] : obj.at("cosine_by_model").items()) {
        record.cosine_by_model[model] = value.get<double>();
    }
    record.n_backend_calls = obj.at("n_backend_calls").get<std::int64_t>();
    record.wall_time_ms = obj.at("wall_time_ms").get<std::int64_t>();
    if (obj.contains("error")) record.error = obj["error"].get<std::string>();
    return record;
}

std::string results_to_jsonl(const std::vector<ResultRecord>& results) {
    std::string out;
    for (const auto& record : results) {
        out += result_to_json_line(record);
        out += '\n';
    }
    return out;
}

std::vector<ResultRecord> results_from_jsonl(const std::string& text) {
    std::vector<ResultRecord> results;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        results.push_back(result_from_json_line(line));
    }
    return results;
}

std::string summary_to_json(const Summary& summary) {
    json methods = json::object();
    for (const auto& [name, ms] : summary.per_method) {
        json cosine = json::object();
        for (const auto& [model, stats] : ms.cosine_by_model) {
            cosine[model] = {{"mean", round6(stats.mean)}, {"stdev", round6(stats.stdev)}};
        }
        methods[name] = {
            {"count", ms.count},
            {"errored", ms.errored},
            {"rouge1_f1", {{"mean", round6(ms.rouge1_f1.mean)}, {"stdev", round6(ms.rouge1_f1.stdev)}}},
            {"cosine_by_model", cosine},
        };
    }
    json obj = {{"methods", methods}, {"total_records", summary.total_records}};
    return obj.dump(2) + "\n";
}

}  // namespace rpe
