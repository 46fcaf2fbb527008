#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

/// Bad arguments: mismatched qubit counts, out-of-range orders, invalid sites.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coefficient still depends on a parameter that no assignment provided.
class UnboundParameterError : public std::invalid_argument {
 public:
  explicit UnboundParameterError(const std::string& name)
      : std::invalid_argument("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Parse failures in the textual operator format or config files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcm
