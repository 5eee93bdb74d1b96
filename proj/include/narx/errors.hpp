#pragma once

#include <stdexcept>
#include <string>

namespace narx {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// An object was used in the wrong lifecycle state.
class StateError : public Error {
public:
    using Error::Error;
};

/// A NaN or Inf appeared where a finite value was required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A function argument violates its precondition.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration key or value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (non-numeric cell, bad line, ragged rows).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally inconsistent file (ragged rows, missing header).
class FormatError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Data that is well formed but unusable (e.g. a constant series).
class DataError : public Error {
public:
    using Error::Error;
};

/// Value outside a function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class FileError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace narx
