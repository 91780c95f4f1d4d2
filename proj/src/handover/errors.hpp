#pragma once

#include <stdexcept>
#include <string>

namespace handover {

// Malformed or inconsistent configuration (bad JSON, rate mismatch, bad ranges).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulated gripper left the sane velocity envelope.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix that must be SPD was not, even after recomputation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace handover
