#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hosc {

enum class ErrorKind {
  ZeroVector,
  InvalidValue,
  DimensionMismatch,
  EmptySet,
  EmptyInput,
  IndexOutOfRange,
  OverlappingPairs,
  DuplicateLabels,
  EmptyGraph,
  UnknownStart,
  InvalidParams,
  ParseError,
  InconsistentDimension,
  DuplicateId,
  NoResolvableWords,
  NoClusters,
  EmptyCluster,
  DegenerateInput,
  IoError,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::OverlappingPairs: return "OverlappingPairs";
    case ErrorKind::DuplicateLabels: return "DuplicateLabels";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::UnknownStart: return "UnknownStart";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InconsistentDimension: return "InconsistentDimension";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::NoResolvableWords: return "NoResolvableWords";
    case ErrorKind::NoClusters: return "NoClusters";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Single exception type for the library. `line()` is 1-based and only set
/// by the loaders (0 otherwise).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0)
      : std::runtime_error(format(kind, what, line)), kind_(kind), line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(ErrorKind kind, const std::string& what, std::size_t line) {
    std::string msg(to_string(kind));
    if (line != 0) msg += " (line " + std::to_string(line) + ")";
    if (!what.empty()) msg += ": " + what;
    return msg;
  }

  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace hosc
