#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gofmc {

/// Base class for every error the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// A model family could not produce an estimate for the given data.
class EstimationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "estimation"; }
};

/// Input data violates a Dataset invariant or a family's requirements.
class DataError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data"; }
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    std::size_t line_;
};

/// Too many synthetic replicates failed, or another engine-level failure.
class SimulationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "simulation"; }
};

class EnumerationBudgetError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "enumeration_budget"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

}  // namespace gofmc
