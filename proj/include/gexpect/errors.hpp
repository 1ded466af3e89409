#pragma once

#include <stdexcept>
#include <string>

namespace gx {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

}  // namespace gx
