#pragma once

#include <stdexcept>
#include <string>

namespace caussearch {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid setting, out-of-range parameter, or missing precondition in a
/// session or run specification.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data (ragged rows, bad tokens, singular
/// designs, unreadable files).
class DataError : public Error {
public:
    using Error::Error;
};

/// A graph or matrix document that cannot be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A test, score or algorithm was handed data of a kind it does not support.
class IncompatibilityError : public Error {
public:
    using Error::Error;
};

/// An operation that needs a DAG received something else.
class NotADagError : public Error {
public:
    using Error::Error;
};

} // namespace caussearch
