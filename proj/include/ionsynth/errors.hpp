#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ionsynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;

    /// Short machine-readable tag, used for the CLI's error JSON.
    virtual const char* kind() const noexcept { return "error"; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

/// A Rabi frequency too small to represent as a double.
class UnderflowError : public Error {
public:
    UnderflowError(const std::string& what, double log_magnitude)
        : Error(what), log_magnitude_(log_magnitude) {}

    /// Natural log of the magnitude that could not be represented.
    double log_magnitude() const noexcept { return log_magnitude_; }
    const char* kind() const noexcept override { return "underflow_error"; }

private:
    double log_magnitude_;
};

/// The Fock truncation is too small for the requested operation.
class TruncationError : public Error {
public:
    explicit TruncationError(const std::string& what,
                             std::optional<std::size_t> pulse_index = std::nullopt)
        : Error(what), pulse_index_(pulse_index) {}

    std::optional<std::size_t> pulse_index() const noexcept { return pulse_index_; }
    const char* kind() const noexcept override { return "truncation_error"; }

private:
    std::optional<std::size_t> pulse_index_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension_mismatch"; }
};

/// Malformed user input (files, targets, flags).
class InputError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "input_error"; }
};

/// An internal consistency check failed.
class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical_error"; }
};

}  // namespace ionsynth
