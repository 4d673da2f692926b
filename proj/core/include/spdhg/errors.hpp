#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdhg {

/// Mismatched block layouts, shapes or index ranges.
class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric argument lies outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sampling assigns zero probability to some block.
class PropernessError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid experiment, step-size or solver configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ESO parameters cannot be derived in closed form for this sampling kind.
class UnsupportedSamplingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite iterate encountered; the solver state is left at the last finite iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : std::runtime_error("diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace spdhg
