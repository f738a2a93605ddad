#pragma once

#include <stdexcept>
#include <string>

namespace isle {

// Bad user-supplied configuration or arguments.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (carries line numbers where applicable).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value fell outside its declared domain (e.g. node id >= num_nodes).
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrix / bitmap dimension mismatch.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem-level failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal invariant or cross-module contract was broken.
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem too large for a dense/desk-scale code path.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace isle
