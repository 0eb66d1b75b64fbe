#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subdiff {

// Argument outside the mathematical domain of a function (beta out of range,
// non-positive time, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result would overflow or otherwise leave the representable range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Caller violated a documented precondition that is not a pure domain issue,
// e.g. a subordinator path that does not reach the requested time.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured resource guard (path length, memory) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation is intentionally not supported for this input.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subdiff
