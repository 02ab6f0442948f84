// Error taxonomy shared by all modules. The CLI maps these onto exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace ctkit {

// Bad configuration value or unknown enum tag.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not match what the operation requires.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input too small (phantom size, metric window).
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/Inf appeared in an iterate; `index` names the failing step.
struct DivergenceError : std::runtime_error {
  long long index;
  DivergenceError(const std::string& what, long long idx)
      : std::runtime_error(what + " (index " + std::to_string(idx) + ")"),
        index(idx) {}
};

// API misuse, e.g. requesting a backward pass without stored states.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ctkit
