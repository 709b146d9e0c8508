#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rpe {

inline constexpr const char* kTemplateFormatVersion = "rpe-templates v1";

/// The natural-language queries the engine sends: prompt inference from one
/// or many responses, difference analysis, difference summarization,
/// candidate revision, and segment rewriting for the retargeting workflow.
///
/// Templates live in a versioned text file (sections headed by [name],
/// placeholders written {name}) so experiments pin the exact query wording.
/// Values are wrapped in the structured blocks from rpe/blocks.hpp before
/// substitution; the surrounding prose is free-form.
class PromptTemplateSet {
public:
    /// Built-in v1 wording.
    static PromptTemplateSet defaults();

    /// Parses a template file. Throws TemplateError for unknown sections,
    /// missing sections, or placeholders a section does not support.
    static PromptTemplateSet load(const std::filesystem::path& path);
    static PromptTemplateSet parse(const std::string& text, const std::string& origin);

    std::string render_infer_one(const std::string& answer) const;
    std::string render_infer_many(const std::vector<std::string>& answers, int m) const;
    std::string render_diff(const std::string& probe_response,
                            const std::vector<std::string>& answers) const;
    std::string render_summarize(const std::vector<std::string>& diff_texts) const;
    std::string render_mutate(const std::string& candidate_text, const std::string& summary) const;
    std::string render_rewrite(const std::string& prompt, const std::string& placeholder,
                               const std::string& replacement) const;

    /// Canonical serialization (section order fixed); load(serialize()) is
    /// the identity.
    std::string serialize() const;

    /// SHA-256 of the canonical serialization; recorded in run manifests.
    std::string digest() const;

private:
    PromptTemplateSet() = default;

    std::string render(const std::string& section,
                       const std::map<std::string, std::string>& values) const;

    std::map<std::string, std::string> sections_;
};

}  // namespace rpe
