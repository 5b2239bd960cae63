#ifndef DDFL_ERRORS_HPP
#define DDFL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddfl {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integration left the guard region, or the adaptive step underflowed /
// ran out of steps while trying. Carries the time reached before giving up.
struct FiniteEscapeError : Error {
  double escape_time;
  FiniteEscapeError(const std::string& what, double t)
      : Error(what), escape_time(t) {}
};

// A plant definition violates its own stated gain bounds.
struct InvalidPlantError : Error {
  using Error::Error;
};

// Bad or missing configuration (files, keys, parameter ranges).
struct ConfigError : Error {
  using Error::Error;
};

// Degenerate data handed to a log-log slope fit.
struct FitError : Error {
  using Error::Error;
};

// Sample window unusable (wrong size, non-finite, rank-deficient solve).
struct EstimatorError : Error {
  using Error::Error;
};

// Non-finite observer inputs or an out-of-range scheduled gain.
struct ObserverError : Error {
  using Error::Error;
};

// Gain synthesis produced something that fails its own certificates.
struct SynthesisError : Error {
  using Error::Error;
};

// Control law asked to divide by a gain estimate below the floor. The
// observer invariants are supposed to make this unreachable.
struct ControllerFaultError : Error {
  using Error::Error;
};

}  // namespace ddfl

#endif  // DDFL_ERRORS_HPP
