#pragma once

#include <stdexcept>
#include <string>

namespace ccme {

// Bad configuration: flags, config file, synthetic spec, parameter ranges.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input video, unwritable output.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Raised under --strict when a budgeted frame cannot honour its SP budget.
class BudgetViolation : public std::runtime_error {
 public:
  explicit BudgetViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccme
