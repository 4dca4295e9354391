/// @file errors.hpp
/// @brief Error hierarchy shared by all flowsal modules.
///
/// Three families matter to callers (the CLI maps them to exit codes):
/// configuration errors, input/format errors, and numeric failures.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowsal {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or violated type invariants. CLI exit code 1.
struct ConfigError : Error {
    using Error::Error;
};

struct ShapeMismatch : ConfigError {
    using ConfigError::ConfigError;
};

struct WindowFull : ConfigError {
    using ConfigError::ConfigError;
};

struct WindowIncomplete : ConfigError {
    using ConfigError::ConfigError;
};

struct GridTooSmall : ConfigError {
    using ConfigError::ConfigError;
};

/// Constant field has no threshold in percentile/otsu mode.
struct DegenerateField : ConfigError {
    using ConfigError::ConfigError;
};

struct SpecOutOfBounds : ConfigError {
    using ConfigError::ConfigError;
};

/// Unreadable or malformed external input. CLI exit code 2.
struct InputUnreadable : Error {
    using Error::Error;
};

/// Failed write of an output artifact. CLI exit code 2.
struct IoError : Error {
    using Error::Error;
};

struct FormatError : Error {
    FormatError(const std::string& file, std::uint64_t byte_offset, const std::string& what)
        : Error(file + " @ byte " + std::to_string(byte_offset) + ": " + what),
          file(file),
          byte_offset(byte_offset) {}

    std::string file;
    std::uint64_t byte_offset = 0;
};

struct BadMagic : FormatError {
    using FormatError::FormatError;
};

struct TruncatedFile : FormatError {
    using FormatError::FormatError;
};

struct DimensionMismatch : FormatError {
    using FormatError::FormatError;
};

/// Non-finite value detected where the contract requires finite data.
/// CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace flowsal
