#pragma once

#include <stdexcept>
#include <string>

namespace tvn {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures: the inputs were well-formed but the computation broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class AntipodalPoints : public NumericalError {
 public:
  AntipodalPoints() : NumericalError("points are antipodal; logarithm/transport undefined") {}
};

class InvalidChart : public Error {
 public:
  using Error::Error;
};

class DegenerateMetric : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCurve : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LostStarShape : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FlatRegion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LineSearchFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvn
