#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qre {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  TraceNotOne,
  DimensionMismatch,
  DimensionOverflow,
  LengthMismatch,
  NegativeProbability,
  NotCommuting,
  TooManyRows,
  SizeMismatch,
  NTooLarge,
  InvalidArgument,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionOverflow: return "DimensionOverflow";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::TooManyRows: return "TooManyRows";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NTooLarge: return "NTooLarge";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Library-wide exception. The kind is machine-checkable, the message names the
/// violated invariant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qre
