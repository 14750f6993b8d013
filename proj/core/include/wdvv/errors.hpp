#pragma once

#include <stdexcept>
#include <string>

namespace wdvv {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (log of a non-positive value,
/// evaluation at a pole, a point on a branch cut).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Incompatible shapes: jets of different layouts, mismatched dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A chart or algebraic construction degenerates (coinciding critical points,
/// singular matrices, resonances without an integrator).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure did not converge or left a residual above its bound.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wdvv
