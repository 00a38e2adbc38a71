#pragma once

#include <stdexcept>
#include <string>

namespace mwst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is outside its documented domain.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed. The message names the offending location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Parsed data violates an instance or configuration invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An operation was given input outside its precondition.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A protocol or simulator contract was broken (e.g. activating a disabled node).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Two independently computed results that must agree did not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace mwst
