#pragma once

#include <stdexcept>
#include <string>

namespace pcbs {

/// Thrown when an operation rejects its input: bad dimensions, empty
/// ranges, values outside a precondition.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown by file readers on malformed on-disk data (truncated records,
/// misaligned lengths). The message carries the byte offset when known.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pcbs
