#pragma once

#include <stdexcept>
#include <string>

namespace wattcolor {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public Error {
  using Error::Error;
};

class NumericError : public Error {
  using Error::Error;
};

// Inconsistent or unsupported settings (space mismatch, bad grid size, ...).
class ConfigError : public Error {
  using Error::Error;
};

// Degenerate or rank-deficient least-squares problems.
class FitError : public Error {
  using Error::Error;
};

// The white-image power ratio cannot reach a requested target.
class CalibrationError : public Error {
  using Error::Error;
};

class InputError : public Error {
  using Error::Error;
};

// An input file holds no header or records at all.
class EmptyInputError : public InputError {
  using InputError::InputError;
};

class MalformedDataError : public Error {
  using Error::Error;
};

class LookupError : public Error {
  using Error::Error;
};

class TrainingError : public Error {
  using Error::Error;
};

}  // namespace wattcolor
