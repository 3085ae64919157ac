#pragma once

#include <stdexcept>
#include <string>

namespace semunit {

// Malformed input: corpus rows, parse files, embedding files, model files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent arguments passed to the library (shape mismatches etc).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace semunit
