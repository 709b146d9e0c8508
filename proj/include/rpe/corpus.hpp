#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rpe {

/// One hidden prompt with identity and provenance.
struct PromptRecord {
    std::string id;
    std::string text;
    std::string source_tag;
};

/// Reads a line-delimited JSON prompt set (fields: id, text, source_tag).
/// Malformed lines raise ParseError naming the line number; duplicate ids
/// and empty texts raise ValidationError.
std::vector<PromptRecord> load_prompt_set(const std::filesystem::path& path);

/// Canonical serialization; load(save(x)) is byte-identical.
std::string serialize_prompt_set(const std::vector<PromptRecord>& records);
void save_prompt_set(const std::vector<PromptRecord>& records, const std::filesystem::path& path);

/// Uniform sample of `count` records without replacement, deterministic for
/// a given seed, returned sorted by id. count > |records| is a
/// PreconditionError.
std::vector<PromptRecord> sample_split(const std::vector<PromptRecord>& records, std::size_t count,
                                       std::uint64_t seed);

}  // namespace rpe
