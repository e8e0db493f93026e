#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mespot {

enum class ErrorKind {
  Argument,
  Parse,
  Validation,
  Reference,
  Geometry,
  Coverage,
  SequenceTooShort,
  UndefinedMetric,
  Configuration,
  Io,
  Training,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the toolkit. The kind lets
/// callers (the CLI in particular) map error classes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace mespot
