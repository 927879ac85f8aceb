#pragma once

#include <stdexcept>
#include <string>

namespace tofgr {

/// Malformed files, inconsistent datasets, bad binary payloads.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor shapes that do not satisfy an operation's contract.
class ShapeError : public DataError {
public:
    explicit ShapeError(const std::string& msg) : DataError(msg) {}
};

/// Inputs that are structurally valid but carry no usable signal
/// (e.g. a depth sequence without a single valid pixel).
class DegenerateInputError : public DataError {
public:
    explicit DegenerateInputError(const std::string& msg) : DataError(msg) {}
};

/// Bad run configuration: unknown keys, missing required options.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tofgr
