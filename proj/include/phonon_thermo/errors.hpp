#pragma once

#include <stdexcept>
#include <string>

namespace phonon_thermo {

/// Input outside the mathematical domain of an operation (T <= 0, P_e not in (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature failed to reach the requested tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what), achieved_tolerance_(achieved_tolerance) {}

  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

/// ODE integration hit t_max before the Bloch right-hand side fell below tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Coarse scan of an objective found no variation to optimize.
class FlatProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid run configuration. `key()` names the offending entry when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key = {})
      : std::runtime_error(what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace phonon_thermo
