#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <memory>

#include "oracle_utils.hpp"
#include "rpe/errors.hpp"
#include "rpe/eval.hpp"
#include "rpe/mock_backend.hpp"
#include "rpe/synthetic_backend.hpp"

using namespace rpe;
namespace fs = std::filesystem;

namespace {

GatewayOptions quiet_options(std::string cache_dir = "") {
    GatewayOptions options;
    options.cache_dir = std::move(cache_dir);
    options.sleeper = [](std::chrono::milliseconds) {};
    return options;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rpe_eval_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Two scripted records driven end-to-end through the 5A5S method.
struct BenchWorld {
    std::shared_ptr<MockBackend> mock = std::make_shared<MockBackend>();
    std::vector<PromptRecord> records = {
        {"r1", "first hidden prompt", "fix"},
        {"r2", "second hidden prompt", "fix"},
    };

    BenchWorld() {
        mock->script_register(MockBackend::Match::Exact, "first hidden prompt",
                              {"w1 answer alpha", "w1 answer beta"});
        mock->script_register(MockBackend::Match::Exact, "second hidden prompt",
                              {"w2 answer alpha", "w2 answer beta"});
        mock->script_register(MockBackend::Match::Substring, "<response index=\"1\">\nw1",
                              {"w1 candidate one", "w1 candidate two"});
        mock->script_register(MockBackend::Match::Substring, "<response index=\"1\">\nw2",
                              {"w2 candidate one", "w2 candidate two"});
        mock->script_register(MockBackend::Match::Exact, "w1 candidate one", {"w1 answer alpha"});
        mock->script_register(MockBackend::Match::Exact, "w1 candidate two", {"w1 probe junk"});
        mock->script_register(MockBackend::Match::Exact, "w2 candidate one", {"w2 probe junk"});
        mock->script_register(MockBackend::Match::Exact, "w2 candidate two", {"w2 answer beta"});
    }

    BenchmarkConfig config() const {
        BenchmarkConfig c;
        c.ga.n = 2;
        c.ga.m = 2;
        c.ga.k = 0;
        c.embedding_models = {kOfflineEmbeddingModel};
        return c;
    }
};

}  // namespace

TEST_CASE("evaluate_pair trivial and derived cases") {
    Gateway gateway(std::make_shared<MockBackend>(), quiet_options());

    const auto identical = evaluate_pair("same prompt text", "same prompt text",
                                         {kOfflineEmbeddingModel}, gateway);
    CHECK(identical.rouge1_f1 == doctest::Approx(1.0));
    CHECK(identical.cosine_by_model.at(kOfflineEmbeddingModel) ==
          doctest::Approx(1.0).epsilon(1e-9));

    const auto empty = evaluate_pair("original", "", {kOfflineEmbeddingModel}, gateway);
    CHECK(empty.rouge1_f1 == 0.0);
    CHECK(empty.cosine_by_model.empty());  // nothing embeddable

    const double expected = oracle::rouge1_brute_force("the cat ate", "the cat sat on the mat").f1;
    const auto derived = evaluate_pair("the cat sat on the mat", "the cat ate", {}, gateway);
    CHECK(derived.rouge1_f1 == expected);
    CHECK(derived.rouge1_f1 == doctest::Approx(4.0 / 9.0).epsilon(1e-15));

    CHECK_THROWS_AS(evaluate_pair("", "recovered", {}, gateway), PreconditionError);
}

TEST_CASE("run_benchmark emits records in input order, deterministically") {
    BenchWorld world;
    Gateway gateway(world.mock, quiet_options());
    const PromptTemplateSet templates = PromptTemplateSet::defaults();

    const auto results = run_benchmark(world.records, Method::FiveAnswersFiveShots,
                                       world.config(), gateway, templates);
    REQUIRE(results.size() == 2);
    CHECK(results[0].prompt_id == "r1");
    CHECK(results[1].prompt_id == "r2");
    CHECK(results[0].method == Method::FiveAnswersFiveShots);
    CHECK_FALSE(results[0].error.has_value());
    CHECK(results[0].n_backend_calls > 0);

    // Second run over a fresh gateway: identical recovered texts and scores.
    Gateway gateway2(world.mock, quiet_options());
    const auto again = run_benchmark(world.records, Method::FiveAnswersFiveShots, world.config(),
                                     gateway2, templates);
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(again[i].recovered_text == results[i].recovered_text);
        CHECK(again[i].rouge1_f1 == results[i].rouge1_f1);
        CHECK(again[i].cosine_by_model == results[i].cosine_by_model);
    }
}

TEST_CASE("run_benchmark resumed from cache issues zero backend calls") {
    BenchWorld world;
    const fs::path cache = fresh_dir("resume");
    const PromptTemplateSet templates = PromptTemplateSet::defaults();

    Gateway first(world.mock, quiet_options(cache.string()));
    const auto results = run_benchmark(world.records, Method::FiveAnswersFiveShots, world.config(),
                                       first, templates);
    CHECK(first.backend_calls() > 0);

    Gateway second(world.mock, quiet_options(cache.string()));
    const auto resumed = run_benchmark(world.records, Method::FiveAnswersFiveShots, world.config(),
                                       second, templates);
    CHECK(second.backend_calls() == 0);
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(resumed[i].recovered_text == results[i].recovered_text);
        CHECK(resumed[i].rouge1_f1 == results[i].rouge1_f1);
        CHECK(resumed[i].n_backend_calls == 0);
    }
}

TEST_CASE("run_benchmark captures per-record failures and continues") {
    BenchWorld world;
    std::vector<PromptRecord> records = world.records;
    records.insert(records.begin() + 1, {"broken", "unscripted prompt text", "fix"});

    Gateway gateway(world.mock, quiet_options());
    const PromptTemplateSet templates = PromptTemplateSet::defaults();
    const auto results =
        run_benchmark(records, Method::FiveAnswersFiveShots, world.config(), gateway, templates);

    REQUIRE(results.size() == 3);
    CHECK_FALSE(results[0].error.has_value());
    REQUIRE(results[1].error.has_value());
    CHECK(results[1].prompt_id == "broken");
    CHECK(results[1].recovered_text.empty());
    CHECK_FALSE(results[2].error.has_value());

    const Summary summary = aggregate(results);
    const MethodSummary& ms = summary.per_method.at("5A5S");
    CHECK(ms.count == 2);
    CHECK(ms.errored == 1);
    CHECK(ms.count + ms.errored == static_cast<int>(results.size()));
}

TEST_CASE("benchmark metrics are re-derivable from the stored texts") {
    BenchWorld world;
    Gateway gateway(world.mock, quiet_options());
    const PromptTemplateSet templates = PromptTemplateSet::defaults();
    const auto results = run_benchmark(world.records, Method::FiveAnswersFiveShots, world.config(),
                                       gateway, templates);

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto rederived = evaluate_pair(world.records[i].text, results[i].recovered_text,
                                             {kOfflineEmbeddingModel}, gateway);
        CHECK(rederived.rouge1_f1 == results[i].rouge1_f1);
        CHECK(rederived.cosine_by_model == results[i].cosine_by_model);
    }
}

TEST_CASE("aggregate computes means and population stdevs") {
    auto row = [](const char* id, Method method, double rouge,
                  std::optional<std::string> error = std::nullopt) {
        ResultRecord r;
        r.prompt_id = id;
        r.method = method;
        r.rouge1_f1 = rouge;
        r.error = std::move(error);
        return r;
    };

    SUBCASE("single record") {
        const Summary s = aggregate({row("a", Method::GA, 0.5)});
        CHECK(s.per_method.at("GA").count == 1);
        CHECK(s.per_method.at("GA").rouge1_f1.mean == doctest::Approx(0.5));
        CHECK(s.per_method.at("GA").rouge1_f1.stdev == doctest::Approx(0.0));
    }

    SUBCASE("empty input") {
        const Summary s = aggregate({});
        CHECK(s.total_records == 0);
        CHECK(s.per_method.empty());
    }

    SUBCASE("two values average") {
        const Summary s = aggregate({row("a", Method::GA, 0.2), row("b", Method::GA, 0.4)});
        CHECK(s.per_method.at("GA").rouge1_f1.mean == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(s.per_method.at("GA").rouge1_f1.stdev == doctest::Approx(0.1).epsilon(1e-12));
    }

    SUBCASE("errored records are counted but excluded from stats") {
        const Summary s = aggregate(
            {row("a", Method::GA, 0.2), row("b", Method::GA, 0.0, "backend down")});
        CHECK(s.per_method.at("GA").count == 1);
        CHECK(s.per_method.at("GA").errored == 1);
        CHECK(s.per_method.at("GA").rouge1_f1.mean == doctest::Approx(0.2));
    }
}

TEST_CASE("result records round-trip through JSON lines") {
    ResultRecord record;
    record.prompt_id = "p7";
    record.method = Method::GAm;
    record.recovered_text = "multi\nline \"text\"";
    record.rouge1_f1 = 4.0 / 9.0;
    record.cosine_by_model[kOfflineEmbeddingModel] = 0.25;
    record.n_backend_calls = 42;
    record.wall_time_ms = 7;

    const std::string line = result_to_json_line(record);
    CHECK(line.find('\n') == std::string::npos);
    const ResultRecord parsed = result_from_json_line(line);
    CHECK(parsed.prompt_id == record.prompt_id);
    CHECK(parsed.method == record.method);
    CHECK(parsed.recovered_text == record.recovered_text);
    CHECK(parsed.rouge1_f1 == doctest::Approx(0.444444).epsilon(1e-12));  // rounded at write
    CHECK(parsed.cosine_by_model.at(kOfflineEmbeddingModel) == doctest::Approx(0.25));
    CHECK_FALSE(parsed.error.has_value());

    record.error = "bad day";
    const ResultRecord with_error = result_from_json_line(result_to_json_line(record));
    CHECK(with_error.error.value() == "bad day");

    const auto many = results_from_jsonl(results_to_jsonl({record, record}));
    CHECK(many.size() == 2);
}

TEST_CASE("method names round-trip") {
    for (Method m : {Method::OneAnswerOneShot, Method::FiveAnswersOneShot,
                     Method::FiveAnswersFiveShots, Method::GA, Method::GAm, Method::GAa}) {
        CHECK(method_from_string(to_string(m)) == m);
    }
    CHECK(method_from_string("5A5S") == Method::FiveAnswersFiveShots);
    CHECK_THROWS_AS(method_from_string("2a3s"), ConfigError);
}

TEST_CASE("round6 rounds at serialization only") {
    CHECK(round6(4.0 / 9.0) == doctest::Approx(0.444444).epsilon(1e-12));
    CHECK(round6(1.0) == 1.0);
    CHECK(round6(0.0) == 0.0);
    CHECK(round6(-0.1234567) == doctest::Approx(-0.123457).epsilon(1e-12));
}

TEST_CASE("synthetic target: GA beats 1A1S on a small record set") {
    auto backend = std::make_shared<SyntheticBackend>();
    Gateway gateway(backend, quiet_options());
    const PromptTemplateSet templates = PromptTemplateSet::defaults();

    std::vector<PromptRecord> records;
    for (const char* text : {"plan a walking tour of the old town",
                             "compare two sorting strategies for big lists",
                             "describe the taste of fresh bread"}) {
        records.push_back({std::string("s") + std::to_string(records.size()), text, "syn"});
    }

    BenchmarkConfig config;
    config.ga.n = 5;
    config.ga.m = 5;
    config.ga.k = 3;
    config.ga.params.seed = 4;
    config.embedding_models = {kOfflineEmbeddingModel};

    const auto ga = run_benchmark(records, Method::GA, config, gateway, templates);
    const auto one_shot = run_benchmark(records, Method::OneAnswerOneShot, config, gateway,
                                        templates);
    const double ga_mean = aggregate(ga).per_method.at("GA").rouge1_f1.mean;
    const double os_mean = aggregate(one_shot).per_method.at("1A1S").rouge1_f1.mean;
    CHECK(ga_mean > os_mean);
}
