#pragma once

#include <stdexcept>
#include <string>

namespace polymatch {

// Malformed or inconsistent input. `code` is a stable machine-readable tag
// (e.g. "unknown_agent", "field_limit") that the CLI echoes verbatim.
class InputError : public std::invalid_argument {
 public:
  InputError(std::string code, const std::string& message)
      : std::invalid_argument(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// The brute-force oracle refuses instances above its search guard.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pipeline loop could not produce a usable matching (e.g. every student
// was removed).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polymatch
