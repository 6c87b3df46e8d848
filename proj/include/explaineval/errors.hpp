#pragma once

#include <stdexcept>
#include <string>

namespace explaineval {

// Malformed input data: bad files, schema violations, duplicate keys.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid run configuration or invalid arguments to an operation.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A correlation was requested on a constant (or too short) series.
class DegenerateSeriesError : public std::runtime_error {
public:
    explicit DegenerateSeriesError(const std::string& what) : std::runtime_error(what) {}
};

// An aggregate has no usable inputs (e.g. every group was degenerate).
// Raised instead of silently reporting 0.
class UndefinedResultError : public std::runtime_error {
public:
    explicit UndefinedResultError(const std::string& what) : std::runtime_error(what) {}
};

// Network transport failed after exhausting retries.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Authentication was rejected; retrying cannot help.
class CredentialError : public std::runtime_error {
public:
    explicit CredentialError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace explaineval
