#pragma once

#include <stdexcept>
#include <string>

namespace vic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration, missing referenced files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (CSV/JSON contents, dataset invariants).
class DataError : public Error {
 public:
  using Error::Error;
};

// File system failures; the message always carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

// Ill-conditioned or diverging numerics.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NearSingularJacobian : public NumericError {
 public:
  using NumericError::NumericError;
};

class NearSingularWeightedInertia : public NumericError {
 public:
  using NumericError::NumericError;
};

class IntegratorDiverged : public NumericError {
 public:
  IntegratorDiverged(const std::string& what, long step) : NumericError(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// The synthetic teacher could not reach a waypoint within the phase budget.
class PhaseTimeout : public Error {
 public:
  PhaseTimeout(const std::string& what, int phase) : Error(what), phase_(phase) {}
  int phase() const { return phase_; }

 private:
  int phase_;
};

}  // namespace vic
