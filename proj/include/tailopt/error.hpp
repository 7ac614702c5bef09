#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tailopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed machine document. Line and column are 1-based; line 0 marks a
/// whole-document error (such as a missing transition) and suppresses the
/// location prefix.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(line == 0 ? what
                          : "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class AlphabetMismatch : public Error {
public:
    using Error::Error;
};

class UnknownSymbol : public Error {
public:
    using Error::Error;
};

/// An observation machine was required to be consistent and is not.
class InconsistentMachine : public Error {
public:
    using Error::Error;
};

/// Raised when a deadline passes; `last_bound` carries the bound being
/// attempted (0 when not applicable).
class Timeout : public Error {
public:
    explicit Timeout(const std::string& what, std::size_t last_bound = 0)
        : Error(what), last_bound_(last_bound) {}
    std::size_t last_bound() const noexcept { return last_bound_; }

private:
    std::size_t last_bound_;
};

/// A construction exceeded its configured size cap.
class TooLarge : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace tailopt
