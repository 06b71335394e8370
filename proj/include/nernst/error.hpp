#ifndef NERNST_ERROR_HPP
#define NERNST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nernst {

/// Root of every exception the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside a model's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed argument (bad count, non-positive temperature, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input that fails a structural invariant (normalization, schema, table shape).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Source and target spectra are not compatible for a population-preserving step.
class StructureError : public Error {
public:
    using Error::Error;
};

/// A protocol precondition does not hold (e.g. curve ordering of a staircase).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Projection onto a level that carries no probability.
class ProjectionError : public Error {
public:
    using Error::Error;
};

/// The model cannot support the requested thermodynamic statement.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Quadrature or root finding failed to converge.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}

    /// Best estimate (value or error bound) reached before giving up.
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// Truncating an infinite spectrum would exceed the level cap.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double tail_weight)
        : Error(what), tail_weight_(tail_weight) {}

    /// Relative Boltzmann weight of the last level inside the cap.
    double tail_weight() const noexcept { return tail_weight_; }

private:
    double tail_weight_;
};

} // namespace nernst

#endif // NERNST_ERROR_HPP
