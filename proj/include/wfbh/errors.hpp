#pragma once

#include <stdexcept>
#include <string>

namespace wfbh {

// Raised when a numeric argument violates an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by oracles that refuse instances beyond their combinatorial budget.
class ProblemTooLarge : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised while loading an experiment configuration; `key()` names the
// offending entry as a dotted path (e.g. "tree.parent[3]").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace wfbh
