#pragma once

#include <stdexcept>
#include <string>

namespace geostretch {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a vector field or closed-form formula.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A model cannot supply the derivative order a computation needs.
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// Mismatched vector or matrix dimensions.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Invalid parameter value (zero rescaling factor, bad model constant, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Quotient or subspace is ill-defined (zero vector, plane collapsed onto the flow, ...).
class DegeneracyError : public Error {
public:
  using Error::Error;
};

/// Supplied vectors are linearly dependent.
class RankError : public Error {
public:
  using Error::Error;
};

/// Round-off produced a value outside its admissible range.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace geostretch
