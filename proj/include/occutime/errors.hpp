#pragma once

#include <stdexcept>
#include <string>

namespace occutime {

// Bad argument values (negative horizon, tau outside [0,1], s < 0, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested operation is not defined for the given function or process
// (gradient of an indicator, bridge estimator for a non-Brownian process).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised while simulating paths, e.g. degenerate diffusion at some time.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A study required a finite quantity and got a divergence or NaN.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace occutime
