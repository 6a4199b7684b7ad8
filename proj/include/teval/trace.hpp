#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teval {

/// Structured form of a JVM-style stack trace of a failed test: the test's
/// qualified name on the first line, the exception line second, and the
/// execution stack after that.
struct ParsedTrace {
    std::string test_qualified_name;
    std::string exception_qualified_name;
    std::string exception_simple_name;  // last dot-separated segment
    std::optional<std::string> message;
    std::vector<std::string> frames;

    bool operator==(const ParsedTrace&) const = default;
};

/// Parses a raw stack trace. The second line is split at the first ": " into
/// exception name and message (no ": " means no message). Frames are the
/// lines of the outermost section, kept verbatim in order; a "Caused by:"
/// line ends that section and the nested cause is not parsed further.
/// Throws DataError when the input has fewer than two lines or the
/// exception line is empty.
ParsedTrace parse_trace(std::string_view raw);

/// True iff a bare `catch` token occurs in the prefix outside string
/// literals, character literals, and comments. This is a lexical scan, not
/// a parse; an unterminated literal or comment is consumed to end of input
/// and reported through `diagnostics` when provided.
bool prefix_has_catch(std::string_view prefix_source,
                      std::vector<std::string>* diagnostics = nullptr);

/// Exception simple names that signal an assertion failure rather than an
/// unexpected runtime exception.
bool is_assertion_exception_name(std::string_view simple_name);

}  // namespace teval
