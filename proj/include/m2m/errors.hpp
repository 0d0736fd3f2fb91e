#pragma once

#include <stdexcept>
#include <string>

namespace m2m {

/// Invalid configuration or model parameters. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
    ConfigError(const std::string& key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(key) {}

    /// Offending key, empty when the error is not tied to one.
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A slot whose cost cannot be evaluated, e.g. offloading over a zero-rate
/// link. Callers in the solver treat it as prohibitive cost. CLI exit code 3.
class InfeasibleSlot : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bayes update with zero evidence for the observation.
class DegenerateUpdate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance too large for exhaustive enumeration.
class OracleSizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// File could not be read or written. CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace m2m
