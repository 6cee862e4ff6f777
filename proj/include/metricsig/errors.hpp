#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace metricsig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied a value outside an operation's domain.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Too few samples for a Bessel-corrected estimate (N - 1 must be >= 1).
class InsufficientSamples : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Input matches more than one accepted shape.
class AmbiguousInput : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// A row of an input file could not be parsed. `line()` is 1-based.
class ParseError : public InvalidInput {
public:
    ParseError(std::size_t line, std::string detail, std::string source = {})
        : InvalidInput((source.empty() ? std::string() : source + ", ") + "line " + std::to_string(line) + ": " +
                       detail),
          line_(line),
          detail_(std::move(detail)),
          source_(std::move(source)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::size_t line_;
    std::string detail_;
    std::string source_;
};

}  // namespace metricsig
