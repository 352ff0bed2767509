#pragma once

#include <stdexcept>
#include <string>

namespace susyode {

/// Base class for every error this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two values from different algebra contexts were combined.
struct ContextMismatch : Error {
    using Error::Error;
};

/// Inversion of a multivector whose body vanishes.
struct NotInvertible : Error {
    using Error::Error;
};

/// An operation received an argument of the wrong parity
/// (e.g. substituting an even polynomial for an odd symbol).
struct ParityError : Error {
    using Error::Error;
};

/// Component equations could not be brought to closed form within the
/// bounded number of substitution passes.
struct ClosureFailure : Error {
    using Error::Error;
};

/// Homogenization requires total degree <= 2 in the dynamic variables.
struct UnsupportedDegree : Error {
    using Error::Error;
};

/// System-file syntax or resolution error, with source position.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : Error("line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + msg),
          line(line_), column(column_) {}
};

} // namespace susyode
