#pragma once

#include <stdexcept>
#include <string>

namespace xdeepint {

// Incompatible matrix/parameter shapes.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed input files, schema violations, bad config keys.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Semantically invalid values (empty dataset, bad fractions, ...).
struct ValueError : std::invalid_argument {
    explicit ValueError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values where finite ones are required (divergence, bad gradients).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace xdeepint
