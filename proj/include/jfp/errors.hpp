#pragma once

#include <stdexcept>
#include <string>

namespace jfp {

/// Invalid user input: bad parameters, malformed problem files, etc.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside a function's domain (poles, b <= -p, ...).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A numerical procedure failed to reach its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace jfp
