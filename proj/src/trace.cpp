#include "teval/trace.hpp"

#include "teval/error.hpp"
#include "teval/text.hpp"

namespace teval {

namespace {

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$';
}

std::string simple_name_of(std::string_view qualified) {
    std::size_t dot = qualified.rfind('.');
    if (dot == std::string_view::npos) return std::string(qualified);
    return std::string(qualified.substr(dot + 1));
}

}  // namespace

ParsedTrace parse_trace(std::string_view raw) {
    const std::vector<std::string> lines = text::split_lines(raw);
    if (lines.size() < 2) {
        throw DataError("stack trace needs at least two lines: \"" + std::string(raw) + "\"");
    }

    ParsedTrace trace;
    trace.test_qualified_name = text::trim(lines[0]);

    const std::string exception_line = text::trim(lines[1]);
    if (exception_line.empty()) {
        throw DataError("stack trace has an empty exception line: \"" + std::string(raw) + "\"");
    }
    const std::size_t sep = exception_line.find(": ");
    if (sep == std::string::npos) {
        trace.exception_qualified_name = exception_line;
    } else {
        trace.exception_qualified_name = exception_line.substr(0, sep);
        trace.message = exception_line.substr(sep + 2);
    }
    trace.exception_simple_name = simple_name_of(trace.exception_qualified_name);

    // Only the outermost section contributes frames; a nested cause keeps
    // the outer exception as the reported one.
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const std::string trimmed = text::trim(lines[i]);
        if (trimmed.starts_with("Caused by:")) break;
        if (trimmed.empty()) continue;
        trace.frames.push_back(lines[i]);
    }
    return trace;
}

bool prefix_has_catch(std::string_view src, std::vector<std::string>* diagnostics) {
    enum class State { Code, LineComment, BlockComment, String, Char };
    State state = State::Code;
    bool found = false;

    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        switch (state) {
            case State::Code:
                if (c == '/' && i + 1 < n && src[i + 1] == '/') {
                    state = State::LineComment;
                    i += 2;
                } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
                    state = State::BlockComment;
                    i += 2;
                } else if (c == '"') {
                    state = State::String;
                    ++i;
                } else if (c == '\'') {
                    state = State::Char;
                    ++i;
                } else if (is_word_char(c)) {
                    std::size_t start = i;
                    while (i < n && is_word_char(src[i])) ++i;
                    if (src.substr(start, i - start) == "catch") found = true;
                } else {
                    ++i;
                }
                break;
            case State::LineComment:
                if (c == '\n') state = State::Code;
                ++i;
                break;
            case State::BlockComment:
                if (c == '*' && i + 1 < n && src[i + 1] == '/') {
                    state = State::Code;
                    i += 2;
                } else {
                    ++i;
                }
                break;
            case State::String:
            case State::Char: {
                const char quote = state == State::String ? '"' : '\'';
                if (c == '\\') {
                    i += 2;
                } else {
                    if (c == quote) state = State::Code;
                    ++i;
                }
                break;
            }
        }
    }

    if (diagnostics != nullptr && state != State::Code) {
        switch (state) {
            case State::String:
                diagnostics->push_back("unterminated string literal in test prefix");
                break;
            case State::Char:
                diagnostics->push_back("unterminated character literal in test prefix");
                break;
            case State::BlockComment:
                diagnostics->push_back("unterminated block comment in test prefix");
                break;
            default:
                break;
        }
    }
    return found;
}

bool is_assertion_exception_name(std::string_view simple_name) {
    return simple_name == "AssertionFailedError" || simple_name == "AssertionError";
}

}  // namespace teval
