#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace teval::text {

std::string trim(std::string_view s);

/// Collapses every run of whitespace to a single space and trims the ends.
std::string normalize_whitespace(std::string_view s);

/// Splits on '\n', dropping a trailing '\r' from each line. A terminal
/// newline does not produce an empty final element.
std::vector<std::string> split_lines(std::string_view s);

/// Tokenizer used for TF-IDF: splits on non-alphanumeric characters and at
/// camelCase boundaries, then lowercases. Empty tokens are dropped.
std::vector<std::string> tokenize_code(std::string_view s);

}  // namespace teval::text
