#pragma once

#include <stdexcept>

namespace vnslab {

/// A parameter set violates a modelling assumption or a resolution requirement.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step was rejected (CFL, non-finite values, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs to an error functional do not line up (grids, times, noise streams).
class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vnslab
