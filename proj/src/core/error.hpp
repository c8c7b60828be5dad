#pragma once

#include <stdexcept>
#include <string>

namespace tddr {

// Invalid hyperparameters, unknown names, malformed config or MDP files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an API contract (shape mismatch, NaN input, non-scalar loss).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation called on an object in the wrong state (e.g. sampling an empty buffer).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training diverged (non-finite loss or parameters).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tddr
