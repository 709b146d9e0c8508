#include "rpe/blocks.hpp"

namespace rpe::blocks {

std::string wrap(const std::string& tag, const std::string& body) {
    return "<" + tag + ">\n" + body + "\n</" + tag + ">";
}

std::string wrap_indexed(const std::string& tag, int index, const std::string& body) {
    return "<" + tag + " index=\"" + std::to_string(index) + "\">\n" + body + "\n</" + tag + ">";
}

std::string response_list(const std::vector<std::string>& answers) {
    std::string out;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += wrap_indexed(kResponseTag, static_cast<int>(i) + 1, answers[i]);
    }
    return out;
}

namespace {

struct Span {
    std::size_t begin;  // first byte of the body
    std::size_t end;    // one past the last byte of the body
    std::size_t close;  // one past the closing fence
};

std::optional<Span> find_block(const std::string& text, const std::string& tag, std::size_t from) {
    const std::string open = "<" + tag;
    const std::string close = "</" + tag + ">";
    std::size_t pos = from;
    while (true) {
        pos = text.find(open, pos);
        if (pos == std::string::npos) return std::nullopt;
        const std::size_t after = pos + open.size();
        // Must be "<tag>" or "<tag ...>", not a longer tag name.
        if (after < text.size() && (text[after] == '>' || text[after] == ' ')) break;
        pos = after;
    }
    const std::size_t gt = text.find('>', pos);
    if (gt == std::string::npos) return std::nullopt;
    const std::size_t end = text.find(close, gt + 1);
    if (end == std::string::npos) return std::nullopt;
    Span span;
    span.begin = gt + 1;
    span.end = end;
    span.close = end + close.size();
    // Drop the framing newlines wrap() adds.
    if (span.begin < span.end && text[span.begin] == '\n') ++span.begin;
    if (span.end > span.begin && text[span.end - 1] == '\n') --span.end;
    return span;
}

}  // namespace

bool contains_tag(const std::string& text, const std::string& tag) {
    return find_block(text, tag, 0).has_value();
}

std::optional<std::string> extract(const std::string& text, const std::string& tag) {
    auto span = find_block(text, tag, 0);
    if (!span) return std::nullopt;
    return text.substr(span->begin, span->end - span->begin);
}

std::vector<std::string> extract_all(const std::string& text, const std::string& tag) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (auto span = find_block(text, tag, from)) {
        out.push_back(text.substr(span->begin, span->end - span->begin));
        from = span->close;
    }
    return out;
}

}  // namespace rpe::blocks
