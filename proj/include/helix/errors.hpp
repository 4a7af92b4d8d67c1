#ifndef HELIX_ERRORS_HPP
#define HELIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace helix {

// Common base so callers can catch everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mixing jets of different variable counts or truncation orders.
struct ShapeError : Error {
    using Error::Error;
};

// Analytic function evaluated outside its domain (sqrt/reciprocal near 0),
// or a probe outside a declared parameter domain.
struct DomainError : Error {
    using Error::Error;
};

// Inputs violate a documented precondition (base-point mismatch, non-unit
// tangent, frame not orthonormal, incompatible frame data, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// Immersion whose differential drops rank at a probe.
struct RankError : PreconditionError {
    using PreconditionError::PreconditionError;
};

// Curve construction that does not exist in the requested geometry
// (e.g. closed circles below the curvature bound of a hyperbolic plane).
struct UnsupportedCurveError : Error {
    using Error::Error;
};

// Malformed or out-of-range construction parameters / documents.
struct ParameterError : Error {
    using Error::Error;
};

// Frame integration exceeded its drift budget.
struct IntegrationError : Error {
    using Error::Error;
};

} // namespace helix

#endif
