#pragma once

#include <stdexcept>
#include <string>

namespace vortexlab {

/// Parameter or precondition violation (CLI exit code 2).
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of iterations or line-search steps (CLI exit code 1).
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, int iterations, double last_residual)
      : std::runtime_error(what), iterations_(iterations), last_residual_(last_residual) {}

  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

private:
  int iterations_;
  double last_residual_;
};

/// A field value pushed an exponential past the configured cap.
class ExponentOverflow : public std::runtime_error {
public:
  ExponentOverflow(const std::string& what, double argument)
      : std::runtime_error(what), argument_(argument) {}
  double argument() const noexcept { return argument_; }

private:
  double argument_;
};

/// File could not be read or written (CLI exit code 3).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace vortexlab
