#pragma once

#include <stdexcept>
#include <string>

namespace scramblemeter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates the invariants of the quantum object it is meant to be
/// (non-Hermitian density matrix, non-isometric columns, incomplete POVM ...).
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, double deviation = 0.0)
        : Error(what), deviation_(deviation) {}

    /// Largest violation that was measured, when one applies.
    double deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

/// Operand shapes do not agree with each other or with a site layout.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The request is well formed but has no answer in this domain, e.g. no
/// subsystem of the requested dimension exists.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace scramblemeter
