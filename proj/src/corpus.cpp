#include "rpe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rpe/errors.hpp"

namespace rpe {

namespace {

using nlohmann::json;

std::string require_string_field(const json& obj, const char* field, int line_no) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        throw ParseError("prompt set line " + std::to_string(line_no) + ": missing string field \"" +
                         field + "\"");
    }
    return obj[field].get<std::string>();
}

/// Uniform draw from [0, bound) using only the standard-specified mt19937_64
/// output stream, so samples are identical across platforms.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const auto span = static_cast<unsigned __int128>(1) << 64;
    const std::uint64_t cutoff = static_cast<std::uint64_t>(span / bound * bound - 1);
    std::uint64_t v = rng();
    while (v > cutoff) v = rng();
    return v % bound;
}

}  // namespace

std::vector<PromptRecord> load_prompt_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open prompt set " + path.string());

    std::vector<PromptRecord> records;
    std::set<std::string> seen;
    std::vector<std::string> duplicates;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("prompt set line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) {
            throw ParseError("prompt set line " + std::to_string(line_no) + ": not a JSON object");
        }
        PromptRecord record;
        record.id = require_string_field(obj, "id", line_no);
        record.text = require_string_field(obj, "text", line_no);
        record.source_tag = require_string_field(obj, "source_tag", line_no);
        if (record.text.empty()) {
            throw ValidationError("prompt set line " + std::to_string(line_no) + ": empty text for id \"" +
                                  record.id + "\"");
        }
        if (!seen.insert(record.id).second) duplicates.push_back(record.id);
        records.push_back(std::move(record));
    }
    if (!duplicates.empty()) {
        std::string listed;
        for (const auto& id : duplicates) {
            if (!listed.empty()) listed += ", ";
            listed += "\"" + id + "\"";
        }
        throw ValidationError("prompt set has duplicate ids: " + listed);
    }
    return records;
}

std::string serialize_prompt_set(const std::vector<PromptRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        json obj = {{"id", record.id}, {"source_tag", record.source_tag}, {"text", record.text}};
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void save_prompt_set(const std::vector<PromptRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write prompt set " + path.string());
    out << serialize_prompt_set(records);
}

std::vector<PromptRecord> sample_split(const std::vector<PromptRecord>& records, std::size_t count,
                                       std::uint64_t seed) {
    if (count > records.size()) {
        throw PreconditionError("sample_split: count " + std::to_string(count) + " exceeds set size " +
                                std::to_string(records.size()));
    }
    std::vector<std::size_t> indices(records.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    // Partial Fisher-Yates: after i steps the first i slots hold the sample.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + uniform_below(rng, indices.size() - i);
        std::swap(indices[i], indices[static_cast<std::size_t>(j)]);
    }

    std::vector<PromptRecord> sample;
    sample.reserve(count);
    for (std::size_t i = 0; i < count; ++i) sample.push_back(records[indices[i]]);
    std::sort(sample.begin(), sample.end(),
              [](const PromptRecord& a, const PromptRecord& b) { return a.id < b.id; });
    return sample;
}

}  // namespace rpe
