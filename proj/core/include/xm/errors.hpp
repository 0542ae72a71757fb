#pragma once

#include <stdexcept>

namespace xm {

// Malformed external input (edge lists, CSV payloads). CLI exit code 1.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments. CLI exit code 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during computation (divergence, collapse). CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace xm
