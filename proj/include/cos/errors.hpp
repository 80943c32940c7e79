#pragma once

#include <stdexcept>
#include <string>

namespace cosim {

// Raised for invalid scenario files, CLI arguments and parameter combinations.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for malformed input files (trace rows, CSV logs); carries the
// offending line number in the message.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cosim
