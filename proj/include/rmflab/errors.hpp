#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rmflab {

/// Invalid argument or violated precondition. Maps to CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed the configured step budget, or an output
/// resource is unavailable. Maps to CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what, std::uint64_t required = 0)
      : std::runtime_error(what), required_(required) {}

  /// Number of integer steps the refused computation would have needed
  /// (0 when not applicable).
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

/// Broken internal invariant (inconsistent factorization data and similar).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rmflab
