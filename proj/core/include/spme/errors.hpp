#ifndef SPME_ERRORS_HPP
#define SPME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spme {

/// Invalid or inconsistent run configuration; raised before any computation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Mode count / grid size incompatibilities (e.g. requesting n > M modes).
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Nonlinear solver did not reach tolerance; carries the last residual so the
/// caller can distinguish "slow" from "diverging".
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual(last_residual), iterations(iterations) {}
  double last_residual;
  int iterations;
};

/// A sample set recorded under one noise convention was fed to an evaluator
/// configured for another.
class ConventionMismatch : public std::runtime_error {
 public:
  explicit ConventionMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spme

#endif
