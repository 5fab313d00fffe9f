// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace saloha {

/// A caller passed arguments outside an operation's documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal invariant was broken. Seeing one of these means a simulator bug.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A node asked for slot timing or an uncertainty bound before its first sync.
class UnsynchronizedError : public std::runtime_error {
 public:
  UnsynchronizedError() : std::runtime_error("node is unsynchronized") {}
};

/// Guard interval does not exceed the post-sync uncertainty.
class GuardTooSmallError : public std::invalid_argument {
 public:
  GuardTooSmallError()
      : std::invalid_argument("guard too small: must exceed initial uncertainty") {}
};

class NoDataError : public std::runtime_error {
 public:
  NoDataError() : std::runtime_error("no data: trace is empty") {}
};

/// Scenario validation failure; `fields()` names every offending entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> fields)
      : std::runtime_error(join(fields)), fields_(std::move(fields)) {}

  const std::vector<std::string>& fields() const { return fields_; }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string out = "invalid configuration:";
    for (const auto& f : fields) {
      out += "\n  ";
      out += f;
    }
    return out;
  }

  std::vector<std::string> fields_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace saloha
