#pragma once

#include <stdexcept>
#include <string>

namespace flowsense {

// Base for all library errors. Subclasses distinguish user/data errors
// (bad files, bad configuration) from contract violations so the CLI can
// map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or unwritable files.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input data: wrong field counts, unparseable numerics,
// empty datasets, unknown categories in strict mode.
class ParseError : public Error {
public:
    using Error::Error;
};

// Invalid configuration values or unknown configuration keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Shape disagreements between related containers (column counts,
// vector lengths, heterogeneous windows).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Inputs outside an operation's domain: too few samples, stream shorter
// than a window, non-finite values, empty series.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace flowsense
