// Command-line front end: single inversions, benchmark runs, report
// generation and the recover-and-retarget workflow.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rpe/config.hpp"
#include "rpe/corpus.hpp"
#include "rpe/engine.hpp"
#include "rpe/errors.hpp"
#include "rpe/eval.hpp"
#include "rpe/manifest.hpp"
#include "rpe/templates.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalFlags {
    std::string config_file;
    rpe::RunConfig config;

    CLI::Option* opt_backend = nullptr;
    CLI::Option* opt_base_url = nullptr;
    CLI::Option* opt_model = nullptr;
    CLI::Option* opt_template_file = nullptr;
    CLI::Option* opt_cache_dir = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_parallelism = nullptr;
    CLI::Option* opt_n = nullptr;
    CLI::Option* opt_m = nullptr;
    CLI::Option* opt_k = nullptr;
    CLI::Option* opt_variant = nullptr;
    CLI::Option* opt_temperature = nullptr;
    CLI::Option* opt_max_tokens = nullptr;
    CLI::Option* opt_mock_script = nullptr;
    CLI::Option* opt_embedding_models = nullptr;

    // Flag values parsed by CLI11; merged over the config file afterwards.
    rpe::RunConfig flags;

    void add_to(CLI::App& app) {
        app.add_option("--config", config_file, "JSON config file");
        opt_backend = app.add_option("--backend", flags.backend, "Backend kind")
                          ->check(CLI::IsMember({"live", "mock", "synthetic"}));
        opt_base_url = app.add_option("--base-url", flags.base_url, "Live backend base URL");
        opt_model = app.add_option("--model", flags.model_id, "Target model id");
        opt_template_file =
            app.add_option("--template-file", flags.template_file, "Prompt template file");
        opt_cache_dir = app.add_option("--cache-dir", flags.cache_dir, "Response cache directory");
        opt_seed = app.add_option("--seed", flags.seed, "Generation seed");
        opt_parallelism =
            app.add_option("--parallelism", flags.parallelism, "Max in-flight backend calls")
                ->check(CLI::PositiveNumber);
        opt_n = app.add_option("--n", flags.n, "Answers per prompt")->check(CLI::PositiveNumber);
        opt_m = app.add_option("--m", flags.m, "Candidate pool size")->check(CLI::PositiveNumber);
        opt_k = app.add_option("--k", flags.k, "Refinement iterations")
                    ->check(CLI::NonNegativeNumber);
        opt_variant = app.add_option("--variant", flags.variant, "Candidate scoring variant")
                          ->check(CLI::IsMember({"ga", "gam", "gaa"}));
        opt_temperature =
            app.add_option("--temperature", flags.temperature, "Sampling temperature");
        opt_max_tokens = app.add_option("--max-tokens", flags.max_tokens, "Completion token cap")
                             ->check(CLI::PositiveNumber);
        opt_mock_script =
            app.add_option("--mock-script", flags.mock_script, "Mock backend script file");
        opt_embedding_models = app.add_option("--embedding-model", flags.embedding_models,
                                              "Embedding model id (repeatable)");
    }

    /// Config file first, explicit flags on top.
    rpe::RunConfig resolve() const {
        rpe::RunConfig resolved = config;
        if (!config_file.empty()) resolved = rpe::RunConfig::from_file(config_file);
        if (*opt_backend) resolved.backend = flags.backend;
        if (*opt_base_url) resolved.base_url = flags.base_url;
        if (*opt_model) resolved.model_id = flags.model_id;
        if (*opt_template_file) resolved.template_file = flags.template_file;
        if (*opt_cache_dir) resolved.cache_dir = flags.cache_dir;
        if (*opt_seed) resolved.seed = flags.seed;
        if (*opt_parallelism) resolved.parallelism = flags.parallelism;
        if (*opt_n) resolved.n = flags.n;
        if (*opt_m) resolved.m = flags.m;
        if (*opt_k) resolved.k = flags.k;
        if (*opt_variant) resolved.variant = flags.variant;
        if (*opt_temperature) resolved.temperature = flags.temperature;
        if (*opt_max_tokens) resolved.max_tokens = flags.max_tokens;
        if (*opt_mock_script) resolved.mock_script = flags.mock_script;
        if (*opt_embedding_models) resolved.embedding_models = flags.embedding_models;
        return resolved;
    }
};

rpe::PromptTemplateSet load_templates(const rpe::RunConfig& config) {
    if (config.template_file.empty()) return rpe::PromptTemplateSet::defaults();
    return rpe::PromptTemplateSet::load(config.template_file);
}

rpe::GAConfig ga_config_of(const rpe::RunConfig& config) {
    rpe::GAConfig ga;
    ga.n = config.n;
    ga.m = config.m;
    ga.k = config.k;
    ga.variant = rpe::score_variant_from_string(config.variant);
    ga.params = config.generation_params();
    return ga;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rpe::Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw rpe::Error("cannot write " + path.string());
    out << content;
}

std::vector<std::string> read_answer_lines(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> answers;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) answers.push_back(line);
    }
    if (answers.empty()) throw rpe::PreconditionError("answers file is empty: " + path.string());
    return answers;
}

json population_to_json(const rpe::Population& pop) {
    json candidates = json::array();
    for (const auto& c : pop.candidates) {
        json entry = {
            {"text", c.text},
            {"born_iteration", c.born_iteration},
        };
        if (c.probe_response) entry["probe_response"] = *c.probe_response;
        if (c.parent_index) entry["parent_index"] = *c.parent_index;
        if (c.breakdown) {
            entry["per_answer"] = c.breakdown->per_answer;
            entry["mean"] = c.breakdown->mean;
            entry["max"] = c.breakdown->max;
            entry["combined"] = c.breakdown->combined;
        }
        candidates.push_back(entry);
    }
    return json{{"iteration", pop.iteration},
                {"variant", rpe::to_string(pop.variant)},
                {"best_combined",
                 pop.candidates.empty()
                     ? 0.0
                     : pop.candidates[static_cast<std::size_t>(rpe::best_index(pop))].combined()},
                {"candidates", candidates}};
}

void write_trace(const fs::path& path, const std::vector<rpe::Population>& trace) {
    json iterations = json::array();
    for (const auto& pop : trace) iterations.push_back(population_to_json(pop));
    write_file(path, json{{"iterations", iterations}}.dump(2) + "\n");
}

// ---------------------------------------------------------------- invert

struct InvertArgs {
    std::string answers_file;
    std::string prompt;
    std::string method = "ga";
    std::string trace_file;
    std::string out_dir;
    std::string from_manifest;
};

int run_invert(const GlobalFlags& globals, InvertArgs args) {
    rpe::RunConfig config;
    if (!args.from_manifest.empty()) {
        const rpe::RunManifest previous = rpe::RunManifest::load(args.from_manifest);
        config = previous.config;
        if (!previous.methods.empty()) args.method = previous.methods.front();
        args.answers_file = previous.inputs.value("answers_file", args.answers_file);
        args.prompt = previous.inputs.value("prompt", args.prompt);
    } else {
        config = globals.resolve();
    }
    if (args.answers_file.empty() == args.prompt.empty()) {
        std::cerr << "invert: provide exactly one of --answers or --prompt\n";
        return 2;
    }

    const rpe::PromptTemplateSet templates = load_templates(config);
    rpe::Gateway gateway = rpe::make_gateway(config);
    rpe::InversionEngine engine(gateway, templates);
    rpe::GAConfig ga = ga_config_of(config);

    rpe::AnswerSet answers;
    if (!args.answers_file.empty()) {
        answers.prompt_text = "";
        answers.params = ga.params;
        answers.answers = read_answer_lines(args.answers_file);
        ga.n = answers.n();
    } else {
        answers = gateway.generate(args.prompt, ga.params, ga.n);
    }

    const rpe::Method method = rpe::method_from_string(args.method);
    std::string recovered;
    std::vector<rpe::Population> trace;
    switch (method) {
        case rpe::Method::OneAnswerOneShot:
            recovered = engine.rpe_1a1s(answers.answers.front(), ga.params);
            break;
        case rpe::Method::FiveAnswersOneShot:
            recovered = engine.rpe_5a1s(answers, ga.params);
            break;
        case rpe::Method::FiveAnswersFiveShots:
            recovered = engine.rpe_5a5s(answers, ga.m, rpe::ScoreVariant::GA, ga.params).text;
            break;
        case rpe::Method::GA:
        case rpe::Method::GAm:
        case rpe::Method::GAa: {
            ga.variant = method == rpe::Method::GA    ? rpe::ScoreVariant::GA
                         : method == rpe::Method::GAm ? rpe::ScoreVariant::GAm
                                                      : rpe::ScoreVariant::GAa;
            try {
                recovered = engine.ga_run(answers, ga, &trace).best.text;
            } catch (...) {
                // Keep the partial trace around for post-mortems.
                if (!args.trace_file.empty() && !trace.empty()) {
                    write_trace(args.trace_file, trace);
                }
                throw;
            }
            break;
        }
    }

    if (!args.trace_file.empty() && !trace.empty()) write_trace(args.trace_file, trace);

    if (!args.out_dir.empty()) {
        fs::create_directories(args.out_dir);
        write_file(fs::path(args.out_dir) / "recovered.txt", recovered + "\n");
        rpe::RunManifest manifest;
        manifest.command = "invert";
        manifest.config = config;
        manifest.methods = {args.method};
        if (!args.answers_file.empty()) manifest.inputs["answers_file"] = args.answers_file;
        if (!args.prompt.empty()) manifest.inputs["prompt"] = args.prompt;
        manifest.template_digest = templates.digest();
        manifest.started_at = manifest.finished_at = rpe::iso8601_now();
        manifest.artifacts["recovered"] = "recovered.txt";
        manifest.save(fs::path(args.out_dir) / "manifest.json");
    }

    std::cout << recovered << "\n";
    return 0;
}

// -------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string prompts_file;
    std::vector<std::string> methods{"ga"};
    std::string out_dir;
    std::string from_manifest;
    int sample = 0;  // 0 = use the whole set
};

int run_benchmark_cmd(const GlobalFlags& globals, const BenchmarkArgs& args) {
    rpe::RunConfig config;
    std::vector<std::string> methods = args.methods;
    std::string prompts_file = args.prompts_file;
    int sample = args.sample;

    if (!args.from_manifest.empty()) {
        const rpe::RunManifest previous = rpe::RunManifest::load(args.from_manifest);
        config = previous.config;
        if (!previous.methods.empty()) methods = previous.methods;
        if (prompts_file.empty()) prompts_file = previous.prompt_set;
        sample = previous.inputs.value("sample", 0);
    } else {
        config = globals.resolve();
    }
    if (prompts_file.empty()) {
        std::cerr << "benchmark: --prompts is required (or --from-manifest)\n";
        return 2;
    }

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    // The manifest keeps the configured cache_dir (possibly empty); the
    // default lives under the output directory, so reruns into a fresh
    // directory start cold and reproduce the original run byte for byte.
    rpe::RunConfig effective = config;
    if (effective.cache_dir.empty()) effective.cache_dir = (out_dir / "cache").string();

    std::vector<rpe::PromptRecord> records = rpe::load_prompt_set(prompts_file);
    if (sample > 0) {
        records = rpe::sample_split(records, static_cast<std::size_t>(sample),
                                    static_cast<std::uint64_t>(config.seed));
    }
    const rpe::PromptTemplateSet templates = load_templates(effective);
    rpe::Gateway gateway = rpe::make_gateway(effective);

    rpe::BenchmarkConfig bench;
    bench.ga = ga_config_of(effective);
    bench.embedding_models = effective.effective_embedding_models();

    rpe::RunManifest manifest;
    manifest.command = "benchmark";
    manifest.config = config;
    manifest.methods = methods;
    manifest.prompt_set = prompts_file;
    if (sample > 0) manifest.inputs["sample"] = sample;
    manifest.template_digest = templates.digest();
    manifest.started_at = rpe::iso8601_now();

    std::vector<rpe::ResultRecord> all_results;
    for (const auto& method_name : methods) {
        const rpe::Method method = rpe::method_from_string(method_name);
        auto results = rpe::run_benchmark(records, method, bench, gateway, templates);
        all_results.insert(all_results.end(), results.begin(), results.end());
    }

    write_file(out_dir / "results.jsonl", rpe::results_to_jsonl(all_results));
    write_file(out_dir / "summary.json", rpe::summary_to_json(rpe::aggregate(all_results)));

    manifest.finished_at = rpe::iso8601_now();
    manifest.artifacts["results"] = "results.jsonl";
    manifest.artifacts["summary"] = "summary.json";
    manifest.save(out_dir / "manifest.json");

    std::cerr << "benchmark: " << all_results.size() << " results, "
              << gateway.backend_calls() << " backend calls, " << gateway.cache_hits()
              << " cache hits\n";
    return 0;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
    std::string results_file;
    std::string out_file;
};

int run_report(const ReportArgs& args) {
    const auto results = rpe::results_from_jsonl(read_file(args.results_file));
    const std::string summary = rpe::summary_to_json(rpe::aggregate(results));
    if (args.out_file.empty()) {
        std::cout << summary;
    } else {
        write_file(args.out_file, summary);
    }
    return 0;
}

// ---------------------------------------------------------------- usecase

struct UsecaseArgs {
    std::vector<std::string> reference_files;
    std::vector<std::string> substitutions;  // "description=replacement"
    std::string out_dir;
    std::string from_manifest;
};

int run_usecase(const GlobalFlags& globals, UsecaseArgs args) {
    rpe::RunConfig config;
    if (!args.from_manifest.empty()) {
        const rpe::RunManifest previous = rpe::RunManifest::load(args.from_manifest);
        config = previous.config;
        args.reference_files =
            previous.inputs.value("references", std::vector<std::string>{});
        args.substitutions =
            previous.inputs.value("substitutions", std::vector<std::string>{});
    } else {
        config = globals.resolve();
    }
    if (args.reference_files.empty()) {
        std::cerr << "usecase: --reference is required (or --from-manifest)\n";
        return 2;
    }
    const rpe::PromptTemplateSet templates = load_templates(config);
    rpe::Gateway gateway = rpe::make_gateway(config);
    rpe::InversionEngine engine(gateway, templates);

    rpe::GAConfig ga = ga_config_of(config);
    rpe::AnswerSet reference_set;
    reference_set.params = ga.params;
    for (const auto& file : args.reference_files) {
        const std::string text = read_file(file);
        if (text.empty()) throw rpe::PreconditionError("reference text is empty: " + file);
        reference_set.answers.push_back(text);
    }
    ga.n = reference_set.n();

    const std::optional<fs::path> out_dir =
        args.out_dir.empty() ? std::nullopt : std::optional<fs::path>(args.out_dir);
    if (out_dir) fs::create_directories(*out_dir);

    const rpe::Candidate best = engine.ga_run(reference_set, ga).best;
    std::cout << "recovered prompt:\n" << best.text << "\n";
    if (out_dir) write_file(*out_dir / "recovered_prompt.txt", best.text + "\n");

    auto emit = [&](int index, const std::string& prompt, const std::string& output) {
        std::cout << "\n--- output " << index << " ---\n" << output << "\n";
        if (out_dir) {
            write_file(*out_dir / ("prompt_" + std::to_string(index) + ".txt"), prompt + "\n");
            write_file(*out_dir / ("output_" + std::to_string(index) + ".txt"), output + "\n");
        }
    };

    if (args.substitutions.empty()) {
        emit(0, best.text, gateway.complete_one(best.text, ga.params));
    }
    for (std::size_t i = 0; i < args.substitutions.size(); ++i) {
        const std::string& spec = args.substitutions[i];
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            std::cerr << "usecase: bad --sub (expected description=replacement): " << spec << "\n";
            return 2;
        }
        const std::string description = spec.substr(0, eq);
        const std::string replacement = spec.substr(eq + 1);
        const std::string rewritten = gateway.complete_one(
            templates.render_rewrite(best.text, description, replacement), ga.params);
        emit(static_cast<int>(i) + 1, rewritten, gateway.complete_one(rewritten, ga.params));
    }

    if (out_dir) {
        rpe::RunManifest manifest;
        manifest.command = "usecase";
        manifest.config = config;
        manifest.inputs["references"] = args.reference_files;
        manifest.inputs["substitutions"] = args.substitutions;
        manifest.template_digest = templates.digest();
        manifest.started_at = manifest.finished_at = rpe::iso8601_now();
        manifest.artifacts["recovered"] = "recovered_prompt.txt";
        manifest.save(*out_dir / "manifest.json");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recover hidden prompts from black-box language model outputs"};
    app.require_subcommand(1);
    // Global flags may appear after the subcommand name.
    app.fallthrough();

    GlobalFlags globals;
    globals.add_to(app);

    InvertArgs invert_args;
    CLI::App* invert = app.add_subcommand("invert", "Recover the prompt behind an answer set");
    invert->add_option("--answers", invert_args.answers_file,
                       "Text file, one answer per line");
    invert->add_option("--prompt", invert_args.prompt,
                       "Hidden prompt to sample answers from first");
    invert->add_option("--method", invert_args.method, "Inversion method")
        ->check(CLI::IsMember({"1a1s", "5a1s", "5a5s", "ga", "gam", "gaa"}));
    invert->add_option("--trace", invert_args.trace_file, "Write per-iteration trace JSON");
    invert->add_option("--out", invert_args.out_dir, "Output directory (adds a manifest)");
    invert->add_option("--from-manifest", invert_args.from_manifest,
                       "Re-run the configuration of a previous manifest");

    BenchmarkArgs bench_args;
    CLI::App* benchmark = app.add_subcommand("benchmark", "Run methods over a prompt set");
    benchmark->add_option("--prompts", bench_args.prompts_file, "Prompt set (JSON lines)");
    benchmark->add_option("--methods", bench_args.methods, "Methods to run (comma separated)")
        ->delimiter(',');
    benchmark->add_option("--out", bench_args.out_dir, "Output directory")->required();
    benchmark->add_option("--from-manifest", bench_args.from_manifest,
                          "Re-run the configuration of a previous manifest");
    benchmark->add_option("--sample", bench_args.sample,
                          "Seeded sample size drawn from the prompt set (0 = all)")
        ->check(CLI::NonNegativeNumber);

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Aggregate a results file");
    report->add_option("--results", report_args.results_file, "results.jsonl path")->required();
    report->add_option("--out", report_args.out_file, "Summary output file (default stdout)");

    UsecaseArgs usecase_args;
    CLI::App* usecase =
        app.add_subcommand("usecase", "Recover a prompt from reference text and retarget it");
    usecase->add_option("--reference", usecase_args.reference_files,
                        "Reference text file (repeatable)");
    usecase->add_option("--sub", usecase_args.substitutions,
                        "Substitution as description=replacement (repeatable)");
    usecase->add_option("--out", usecase_args.out_dir, "Output directory");
    usecase->add_option("--from-manifest", usecase_args.from_manifest,
                        "Re-run the configuration of a previous manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (invert->parsed()) return run_invert(globals, invert_args);
        if (benchmark->parsed()) return run_benchmark_cmd(globals, bench_args);
        if (report->parsed()) return run_report(report_args);
        if (usecase->parsed()) return run_usecase(globals, usecase_args);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
