#pragma once

#include <stdexcept>
#include <string>

namespace crosstwin {

// Argument sizes disagree (joint vectors, action vectors, tensors).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An index or discrete value falls outside its admissible range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input violates a numeric precondition (non-unit axis, non-orthonormal matrix, ...).
class ValidityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration file or override could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite quantity and cannot continue.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crosstwin
