#pragma once

#include <stdexcept>
#include <string>

namespace teval {

/// Malformed or inconsistent input data (bad files, broken invariants,
/// dangling references). Mapped to exit code 2 by the CLI.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or flag combination. Mapped to exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace teval
