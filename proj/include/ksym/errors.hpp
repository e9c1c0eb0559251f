#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksym {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression source. `position` is a 0-based byte offset.
struct SyntaxError : Error {
  SyntaxError(const std::string& what, std::size_t position_)
      : Error(what), position(position_) {}
  std::size_t position;
};

/// Identifier that is neither a coordinate nor a known function.
struct UnknownVariable : Error {
  UnknownVariable(const std::string& what, std::string name_)
      : Error(what), name(std::move(name_)) {}
  std::string name;
};

/// Coordinate index outside 1..n (base) or slot outside 1..k (velocity).
struct IndexOutOfRange : Error {
  using Error::Error;
};

/// A Div denominator evaluated to zero; the message names the subtree.
struct DivisionByZero : Error {
  using Error::Error;
};

/// Sizes of points, vectors or tensors disagree with the chart dimensions.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A (1,1) tensor failed the almost-product identities at some probe.
struct NotAConnectionTensor : Error {
  using Error::Error;
};

/// A vector field that must live on the base depends on a velocity.
struct VelocityDependence : Error {
  using Error::Error;
};

/// A grid axis has too few nodes for the difference stencils.
struct GridTooSmall : Error {
  using Error::Error;
};

/// An integrated trajectory left the trusted range or became non-finite.
struct NonFiniteState : Error {
  using Error::Error;
};

/// A scalar parameter outside its admissible range.
struct InvalidParameter : Error {
  using Error::Error;
};

/// The velocity Hessian is not invertible where it has to be.
struct SingularHessian : Error {
  SingularHessian(const std::string& what, double det_) : Error(what), det(det_) {}
  double det;
};

/// A linear system that should have full rank does not.
struct RankDeficiencyUnexpected : Error {
  using Error::Error;
};

/// An operation was called outside its stated precondition.
struct PreconditionViolated : Error {
  using Error::Error;
};

/// Bad model file. `line` is 1-based, 0 when no line applies.
struct ModelError : Error {
  ModelError(const std::string& what, int line_ = 0) : Error(what), line(line_) {}
  int line;
};

/// Bad grid CSV file.
struct CsvError : Error {
  using Error::Error;
};

}  // namespace ksym
