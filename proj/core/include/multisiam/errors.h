#pragma once

#include <stdexcept>
#include <string>

namespace multisiam {

/// Shape or index disagreement between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value produced or consumed where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable, malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint file that does not match the expected binary layout.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace multisiam
