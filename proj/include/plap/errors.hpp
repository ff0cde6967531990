#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Invalid input or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed (non-convergence, bracketing failure, ...).
/// Carries the last residual reached so callers can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_residual = 0.0, int iterations = 0)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

}  // namespace plap
