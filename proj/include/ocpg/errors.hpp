#pragma once

#include <stdexcept>
#include <string>

namespace ocpg {

// Invalid shapes, parameters, or file contents supplied by the caller/config.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An API precondition was violated by calling code.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Training produced non-finite values; carries step-stamped diagnostics.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Wrong CLI/operation usage (maps to exit code 2).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ocpg
