#pragma once

#include <stdexcept>
#include <string>

namespace ridgebound {

/// Base class for all toolkit errors. CLI maps these to exit code 2;
/// UsageError maps to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Query outside an evaluable domain (e.g. tabulated grid).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance. Carries the achieved
/// estimate so callers can decide whether to accept it anyway.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double achieved_value,
                 double achieved_error)
      : Error(what), value(achieved_value), error_estimate(achieved_error) {}
  double value;
  double error_estimate;
};

/// Integrand produced NaN/Inf. Carries the offending location.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, double where) : Error(what), location(where) {}
  double location;
};

class NotAdmissibleError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class NotImplementedError : public Error {
 public:
  using Error::Error;
};

/// Truncation box too small for the requested tolerance. Carries a suggestion.
class EnlargeBoxError : public Error {
 public:
  EnlargeBoxError(const std::string& what, double suggested_a, double suggested_b)
      : Error(what), suggested_a_extent(suggested_a), suggested_b_extent(suggested_b) {}
  double suggested_a_extent;
  double suggested_b_extent;
};

}  // namespace ridgebound
