#include "rpe/templates.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "rpe/blocks.hpp"
#include "rpe/errors.hpp"
#include "rpe/hashing.hpp"

namespace rpe {

namespace {

struct SectionSpec {
    const char* name;
    std::set<std::string> placeholders;
};

// Placeholders each section may (but need not) use.
const std::array<SectionSpec, 6>& section_specs() {
    static const std::array<SectionSpec, 6> specs = {{
        {"infer_one", {"answer"}},
        {"infer_many", {"answers", "m", "n"}},
        {"diff", {"probe", "answers"}},
        {"summarize", {"diffs"}},
        {"mutate", {"candidate", "summary"}},
        {"rewrite", {"prompt", "placeholder", "replacement"}},
    }};
    return specs;
}

const SectionSpec* find_spec(const std::string& name) {
    for (const auto& spec : section_specs()) {
        if (name == spec.name) return &spec;
    }
    return nullptr;
}

bool placeholder_char(char c) {
    return (c >= 'a' && c <= 'z') || c == '_';
}

/// Collects every {name} occurrence; only lowercase/underscore names count.
std::vector<std::string> scan_placeholders(const std::string& text) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < text.size() && placeholder_char(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') {
            names.push_back(text.substr(i + 1, j - i - 1));
            i = j;
        }
    }
    return names;
}

std::string trim_blank_edges(const std::string& body) {
    std::size_t begin = 0, end = body.size();
    while (begin < end && (body[begin] == '\n' || body[begin] == '\r')) ++begin;
    while (end > begin && (body[end - 1] == '\n' || body[end - 1] == '\r' || body[end - 1] == ' ')) --end;
    return body.substr(begin, end - begin);
}

const char* default_section(const std::string& name) {
    if (name == "infer_one") {
        return "The following response was produced by a language model that was given a hidden "
               "prompt.\n\n{answer}\n\nInfer the hidden prompt. Reply with only the prompt text, "
               "nothing else.";
    }
    if (name == "infer_many") {
        return "Each of the following responses was produced by a language model that was given "
               "the same hidden prompt.\n\n{answers}\n\nInfer the hidden prompt. Reply with only "
               "the prompt text, nothing else.";
    }
    if (name == "diff") {
        return "A candidate response and a set of reference responses are given below. The "
               "reference responses all come from the same hidden prompt.\n\n{probe}\n\n{answers}"
               "\n\nIdentify the differences between the candidate response and the reference "
               "responses.";
    }
    if (name == "summarize") {
        return "Summarize the following difference reports as a short list of concrete "
               "changes.\n\n{diffs}";
    }
    if (name == "mutate") {
        return "A candidate prompt and a summary of how its response differs from the target "
               "responses are given below.\n\n{candidate}\n\n{summary}\n\nRevise the candidate "
               "prompt so that its responses would better match the target responses. Reply with "
               "only the revised prompt text, nothing else.";
    }
    if (name == "rewrite") {
        return "A prompt is given below.\n\n{prompt}\n\nRewrite the prompt, replacing the part "
               "described as {placeholder} with {replacement}. Keep everything else unchanged. "
               "Reply with only the rewritten prompt text, nothing else.";
    }
    return "";
}

}  // namespace

PromptTemplateSet PromptTemplateSet::defaults() {
    PromptTemplateSet set;
    for (const auto& spec : section_specs()) {
        set.sections_[spec.name] = default_section(spec.name);
    }
    return set;
}

PromptTemplateSet PromptTemplateSet::parse(const std::string& text, const std::string& origin) {
    PromptTemplateSet set;
    std::istringstream in(text);
    std::string line;
    std::string current;
    std::string body;
    auto flush = [&] {
        if (!current.empty()) set.sections_[current] = trim_blank_edges(body);
        body.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
            const std::string name = line.substr(1, line.size() - 2);
            if (!find_spec(name)) {
                throw TemplateError(origin + ": unknown template section [" + name + "]");
            }
            flush();
            current = name;
            continue;
        }
        if (current.empty()) {
            // Preamble: blank lines and # comments only.
            if (line.empty() || line[0] == '#') continue;
            throw TemplateError(origin + ": text before the first [section] header");
        }
        body += line;
        body += '\n';
    }
    flush();

    for (const auto& spec : section_specs()) {
        auto it = set.sections_.find(spec.name);
        if (it == set.sections_.end()) {
            throw TemplateError(origin + ": missing template section [" + std::string(spec.name) +
                                "]");
        }
        for (const auto& name : scan_placeholders(it->second)) {
            if (!spec.placeholders.count(name)) {
                throw TemplateError(origin + ": section [" + std::string(spec.name) +
                                    "] uses unknown placeholder {" + name + "}");
            }
        }
    }
    return set;
}

PromptTemplateSet PromptTemplateSet::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot open template file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::string PromptTemplateSet::render(const std::string& section,
                                      const std::map<std::string, std::string>& values) const {
    const std::string& tmpl = sections_.at(section);
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '{') {
            std::size_t j = i + 1;
            while (j < tmpl.size() && placeholder_char(tmpl[j])) ++j;
            if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
                const std::string name = tmpl.substr(i + 1, j - i - 1);
                auto it = values.find(name);
                if (it == values.end()) {
                    throw TemplateError("section [" + section + "]: unresolved placeholder {" +
                                        name + "}");
                }
                out += it->second;  // inserted verbatim, never rescanned
                i = j;
                continue;
            }
        }
        out.push_back(tmpl[i]);
    }
    return out;
}

std::string PromptTemplateSet::render_infer_one(const std::string& answer) const {
    return render("infer_one", {{"answer", blocks::wrap(blocks::kResponseTag, answer)}});
}

std::string PromptTemplateSet::render_infer_many(const std::vector<std::string>& answers,
                                                 int m) const {
    return render("infer_many", {{"answers", blocks::response_list(answers)},
                                 {"m", std::to_string(m)},
                                 {"n", std::to_string(answers.size())}});
}

std::string PromptTemplateSet::render_diff(const std::string& probe_response,
                                           const std::vector<std::string>& answers) const {
    return render("diff", {{"probe", blocks::wrap(blocks::kCandidateResponseTag, probe_response)},
                           {"answers", blocks::response_list(answers)}});
}

std::string PromptTemplateSet::render_summarize(const std::vector<std::string>& diff_texts) const {
    std::string reports;
    for (std::size_t i = 0; i < diff_texts.size(); ++i) {
        if (i > 0) reports += "\n\n";
        reports += blocks::wrap(blocks::kDifferenceReportTag, diff_texts[i]);
    }
    return render("summarize", {{"diffs", reports}});
}

std::string PromptTemplateSet::render_mutate(const std::string& candidate_text,
                                             const std::string& summary) const {
    return render("mutate",
                  {{"candidate", blocks::wrap(blocks::kCandidatePromptTag, candidate_text)},
                   {"summary", blocks::wrap(blocks::kDifferenceSummaryTag, summary)}});
}

std::string PromptTemplateSet::render_rewrite(const std::string& prompt,
                                              const std::string& placeholder,
                                              const std::string& replacement) const {
    return render("rewrite", {{"prompt", blocks::wrap(blocks::kPromptTag, prompt)},
                              {"placeholder", blocks::wrap(blocks::kSegmentTag, placeholder)},
                              {"replacement", blocks::wrap(blocks::kReplacementTag, replacement)}});
}

std::string PromptTemplateSet::serialize() const {
    std::string out = "# ";
    out += kTemplateFormatVersion;
    out += "\n";
    for (const auto& spec : section_specs()) {
        out += "\n[";
        out += spec.name;
        out += "]\n";
        out += sections_.at(spec.name);
        out += "\n";
    }
    return out;
}

std::string PromptTemplateSet::digest() const {
    return sha256_hex(serialize());
}

}  // namespace rpe
