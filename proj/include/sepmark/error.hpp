#pragma once

#include <stdexcept>
#include <string>

namespace sepmark {

// Malformed or inconsistent input: bad corpus files, misaligned corpora,
// unreadable model files, enumeration bounds exceeded.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested model scheme cannot represent the given annotation
// (e.g. a single-chain tagger asked to encode overlapping mentions).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A separator sequence violates a boundary or adjacency constraint.
struct InvalidSequenceError : std::runtime_error {
  int gap;
  InvalidSequenceError(const std::string& msg, int gap_index)
      : std::runtime_error(msg), gap(gap_index) {}
};

}  // namespace sepmark
