#pragma once

#include <stdexcept>
#include <string>

namespace pseudovoc {

enum class ErrorKind {
  MalformedAnnotation,
  UnknownClass,
  InvalidBox,
  MalformedLine,
  MissingAnnotation,
  MalformedRecord,
  ScoreOutOfRange,
  UnknownImage,
  ClassSetMismatch,
  InvalidParams,
  IoFailure,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::MissingAnnotation: return "MissingAnnotation";
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::UnknownImage: return "UnknownImage";
    case ErrorKind::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Error";
}

/// Input or validation failure. Carries a kind so callers can branch on
/// the failure class without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pseudovoc
