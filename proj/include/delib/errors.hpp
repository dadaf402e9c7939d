#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace delib {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document. Carries a 1-based line/column when known.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed input that violates a model invariant (cycle, bad CPT, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// p(E) = 0, so no posterior is defined.
class ZeroEvidenceError : public Error {
public:
    ZeroEvidenceError() : Error("zero evidence probability") {}
};

// Exceeded a configured size cap (enumeration space, cutset instantiations).
class CapacityError : public Error {
public:
    using Error::Error;
};

}  // namespace delib
