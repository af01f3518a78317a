#ifndef TTAAD_ERROR_HPP
#define TTAAD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ttaad {

/// Malformed input, invalid parameters, I/O failure. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric that needs both IN and OUT samples was asked to run on a single class.
class UndefinedMetricError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure (non-convergence, divergence). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ttaad

#endif  // TTAAD_ERROR_HPP
