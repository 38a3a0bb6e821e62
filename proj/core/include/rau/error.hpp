#pragma once

#include <stdexcept>
#include <string>

namespace rau {

/// Raised for malformed user input: bad files, invalid configs, shape mismatches
/// at public API boundaries. The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for dimension mismatches between operands.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace rau
