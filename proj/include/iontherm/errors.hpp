#pragma once

#include <stdexcept>
#include <string>

namespace iontherm {

enum class ErrorKind {
  InvalidConfig,
  ParseError,
  InvalidDimension,
  TruncationTooSmall,
  OutOfTaper,
  NonConvergence,
  DimensionTooLarge,
};

/// Base error for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Malformed input as opposed to a numerical failure.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::InvalidConfig || kind_ == ErrorKind::ParseError;
  }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace iontherm
