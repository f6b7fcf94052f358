#pragma once

#include <stdexcept>
#include <string>

namespace smectic {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent user input: boundary specifications, case data, parameters.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// A closed-form function was evaluated at a point where it is undefined.
class DomainError : public Error {
public:
    using Error::Error;
};

class ElementConstructionError : public Error {
public:
    using Error::Error;
};

class NonConformingInputError : public Error {
public:
    using Error::Error;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// Output files could not be written or failed an internal consistency check.
class ReportError : public Error {
public:
    using Error::Error;
};

} // namespace smectic
