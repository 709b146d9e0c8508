#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rpe::blocks {

// Structured blocks the engine wraps around values before they are
// substituted into a prompt template. Query text stays free-form; these
// fences give offline backends (and humans reading transcripts) a stable
// way to locate the payload inside a rendered query.

inline constexpr const char* kResponseTag = "response";
inline constexpr const char* kCandidateResponseTag = "candidate_response";
inline constexpr const char* kDifferenceReportTag = "difference_report";
inline constexpr const char* kCandidatePromptTag = "candidate_prompt";
inline constexpr const char* kDifferenceSummaryTag = "difference_summary";
inline constexpr const char* kPromptTag = "prompt";
inline constexpr const char* kSegmentTag = "segment";
inline constexpr const char* kReplacementTag = "replacement";

std::string wrap(const std::string& tag, const std::string& body);
std::string wrap_indexed(const std::string& tag, int index, const std::string& body);

/// One <response index="i"> block per answer, 1-based, separated by blank lines.
std::string response_list(const std::vector<std::string>& answers);

bool contains_tag(const std::string& text, const std::string& tag);

/// Body of the first <tag ...>...</tag> block, with the fence's framing
/// newlines stripped. nullopt when no block is present.
std::optional<std::string> extract(const std::string& text, const std::string& tag);

/// Bodies of every <tag ...> block, in document order.
std::vector<std::string> extract_all(const std::string& text, const std::string& tag);

}  // namespace rpe::blocks
