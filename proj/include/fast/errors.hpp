#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fast {

// Caller passed a value outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model fit did not produce a usable likelihood (separation, divergence,
// or a nested pair whose log-likelihoods are inconsistent).
class FittingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An interim analysis fired before enough subjects were available.
class SchedulingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationIssue {
  std::string field;
  std::string reason;
};

// Invalid scenario configuration. Carries every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ValidationIssue> issues);
  explicit ConfigError(const std::string& field, const std::string& reason)
      : ConfigError(std::vector<ValidationIssue>{{field, reason}}) {}

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

}  // namespace fast
