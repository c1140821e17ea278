#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvsaddle {

// Bad input: violated precondition, malformed shape, out-of-range parameter.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure inside an otherwise valid call (e.g. singular system).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public SolverError {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : SolverError(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Requested metric has no oracle on this problem.
class UnsupportedMetricError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tvsaddle
