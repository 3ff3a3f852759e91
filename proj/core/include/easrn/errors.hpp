#pragma once

#include <stdexcept>
#include <string>

namespace easrn {

// Invalid user-facing configuration (bad flag values, image too small for the
// requested pyramid depth, ...). The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Caller broke a precondition of an operation (shape mismatch, empty input).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace easrn
