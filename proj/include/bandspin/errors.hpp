// errors.hpp — Exception types shared across the library.
//
// ConfigError   — invalid parameters, dimension mismatches, malformed input.
// AccuracyError — a numerical tolerance was violated (e.g. norm drift).
// IoError       — file read/write failures, always carrying the path.

#pragma once

#include <stdexcept>
#include <string>

namespace bandspin {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AccuracyError : std::runtime_error {
    explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bandspin
