#pragma once

#include <stdexcept>
#include <string>

namespace kkoop {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller error: dimension mismatch, empty input, bad configuration value.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input is well-formed but geometrically degenerate (duplicate centers,
// zero-length limb segment, too few points).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// SPD factorization failed even after the requested jitter escalation.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed file contents; message carries file and line.
class ParseError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace kkoop
