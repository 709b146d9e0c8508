#include "rpe/synthetic_backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "rpe/blocks.hpp"
#include "rpe/hashing.hpp"
#include "rpe/mock_backend.hpp"

namespace rpe {

namespace {

// Filler vocabulary the simulated reasoner hallucinates from.
constexpr std::array<const char*, 8> kFillers = {
    "please", "detailed", "kindly", "comprehensive",
    "various", "specific", "clear",  "thorough",
};

bool all_digits(const std::string& token) {
    return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

std::string join(const std::set<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

std::set<std::string> keyword_union(const std::vector<std::string>& texts) {
    std::set<std::string> all;
    for (const auto& t : texts) {
        auto kws = SyntheticBackend::keywords(t);
        all.insert(kws.begin(), kws.end());
    }
    return all;
}

SplitMix make_rng(const std::string& content, const GenerationParams& params, int sample_index) {
    std::uint64_t seed = fnv1a64(content);
    seed ^= 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(sample_index + 1);
    if (params.seed) seed ^= 0xbf58476d1ce4e5b9ull * static_cast<std::uint64_t>(*params.seed + 1);
    return SplitMix(seed);
}

/// Keeps each keyword with probability (1 - drop), guarantees at least one
/// survivor, then mixes in up to max_noise fillers.
std::set<std::string> degrade(const std::set<std::string>& kws, double drop, int max_noise,
                              SplitMix& rng) {
    std::set<std::string> kept;
    for (const auto& w : kws) {
        if (rng.next_unit() >= drop) kept.insert(w);
    }
    if (kept.empty() && !kws.empty()) kept.insert(*kws.begin());
    const int noise = max_noise > 0 ? static_cast<int>(rng.next_below(
                                          static_cast<std::uint64_t>(max_noise) + 1))
                                    : 0;
    for (int i = 0; i < noise; ++i) {
        kept.insert(kFillers[rng.next_below(kFillers.size())]);
    }
    return kept;
}

std::set<std::string> parse_word_line(const std::string& body, const std::string& label) {
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(label, 0) == 0) {
            std::istringstream words(line.substr(label.size()));
            std::set<std::string> out;
            std::string w;
            while (words >> w) out.insert(w);
            return out;
        }
    }
    return {};
}

std::string word_line(const std::string& label, const std::set<std::string>& words) {
    return label + " " + join(words);
}

}  // namespace

std::set<std::string> SyntheticBackend::keywords(const std::string& text) {
    std::set<std::string> out;
    for (const auto& [token, count] : tokenize(text).tokens) {
        if (!all_digits(token)) out.insert(token);
    }
    return out;
}

std::string SyntheticBackend::target_answer(const std::string& prompt, int sample_index) {
    std::set<std::string> sorted;
    for (const auto& [token, count] : tokenize(prompt).tokens) sorted.insert(token);
    std::string body = join(sorted);
    if (!body.empty()) body.push_back(' ');
    return body + "#" + std::to_string(sample_index);
}

std::string SyntheticBackend::complete(const std::string& prompt, const GenerationParams& params,
                                       int sample_index) {
    using namespace blocks;

    // Revision query: candidate prompt + difference summary.
    if (contains_tag(prompt, kCandidatePromptTag) && contains_tag(prompt, kDifferenceSummaryTag)) {
        const std::string candidate = extract(prompt, kCandidatePromptTag).value_or("");
        const std::string summary = extract(prompt, kDifferenceSummaryTag).value_or("");
        std::set<std::string> kws = keywords(candidate);
        const std::set<std::string> add = parse_word_line(summary, "add:");
        const std::set<std::string> remove = parse_word_line(summary, "remove:");
        int budget = behavior_.revise_add_budget;
        for (const auto& w : add) {
            if (budget-- <= 0) break;
            kws.insert(w);
        }
        budget = behavior_.revise_remove_budget;
        for (const auto& w : remove) {
            if (budget-- <= 0) break;
            kws.erase(w);
        }
        return kws.empty() ? candidate : join(kws);
    }

    // Difference query: candidate response vs. reference responses.
    if (contains_tag(prompt, kCandidateResponseTag)) {
        const std::string probe = extract(prompt, kCandidateResponseTag).value_or("");
        const std::set<std::string> refs = keyword_union(extract_all(prompt, kResponseTag));
        const std::set<std::string> probe_kws = keywords(probe);
        std::set<std::string> missing, extra;
        std::set_difference(refs.begin(), refs.end(), probe_kws.begin(), probe_kws.end(),
                            std::inserter(missing, missing.end()));
        std::set_difference(probe_kws.begin(), probe_kws.end(), refs.begin(), refs.end(),
                            std::inserter(extra, extra.end()));
        return word_line("missing:", missing) + "\n" + word_line("extra:", extra);
    }

    // Summary query: difference reports in, add/remove directive out.
    if (contains_tag(prompt, kDifferenceReportTag)) {
        std::set<std::string> add, remove;
        for (const auto& report : extract_all(prompt, kDifferenceReportTag)) {
            const auto missing = parse_word_line(report, "missing:");
            const auto extra = parse_word_line(report, "extra:");
            add.insert(missing.begin(), missing.end());
            remove.insert(extra.begin(), extra.end());
        }
        return word_line("add:", add) + "\n" + word_line("remove:", remove);
    }

    // Rewrite query: swap the described segment's keywords for the
    // replacement's.
    if (contains_tag(prompt, kReplacementTag) && contains_tag(prompt, kPromptTag)) {
        const std::string base = extract(prompt, kPromptTag).value_or("");
        const std::string segment = extract(prompt, kSegmentTag).value_or("");
        const std::string replacement = extract(prompt, kReplacementTag).value_or("");
        std::set<std::string> kws = keywords(base);
        for (const auto& w : keywords(segment)) kws.erase(w);
        for (const auto& w : keywords(replacement)) kws.insert(w);
        return join(kws);
    }

    // Prompt inference from a response set.
    if (auto responses = extract_all(prompt, kResponseTag); !responses.empty()) {
        const std::set<std::string> kws = keyword_union(responses);
        SplitMix rng = make_rng(prompt, params, sample_index);
        if (responses.size() > 1) {
            return join(degrade(kws, behavior_.infer_many_drop, behavior_.infer_many_noise, rng));
        }
        return join(degrade(kws, behavior_.infer_one_drop, behavior_.infer_one_noise, rng));
    }

    // Anything else is a plain prompt hitting the invertible target.
    return target_answer(prompt, sample_index);
}

EmbeddingVector SyntheticBackend::embed(const std::string& text, const std::string& model_id) {
    return hash_embedding(text, model_id);
}

}  // namespace rpe
