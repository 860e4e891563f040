#include "fast/errors.hpp"

namespace fast {

namespace {

std::string join_issues(const std::vector<ValidationIssue>& issues) {
  std::string out = "invalid scenario configuration";
  for (const auto& issue : issues) {
    out += "\n  ";
    out += issue.field;
    out += ": ";
    out += issue.reason;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ValidationIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace fast
