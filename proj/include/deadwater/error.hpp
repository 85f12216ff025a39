#pragma once

#include <stdexcept>
#include <string>

namespace deadwater {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (s <= 0, negative dt, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Mismatched sizes or grids between fields.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Iterative routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration value. `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// A quadrature rule needs the forcing at a time the speed profile cannot provide.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared while time stepping.
class DivergenceError : public Error {
 public:
  DivergenceError(long step, const std::string& message)
      : Error(message + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace deadwater
