#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dualuta {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedValue,
  kInvalidGrid,
  kInvalidModel,
  kOutOfScale,
  kGridMismatch,
  kOracleFailure,
  kIterationBudgetExceeded,
  kDegenerateGeometry,
  kDegenerate,
  kPhiZero,
  kInconsistentAnswers,
  kNoValidReferencePair,
  kReplayDivergence,
  kReplayExhausted,
  kStateError,
  kNotFound,
  kNoPending,
  kSessionClosed,
  kNotDone,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedValue: return "MalformedValue";
    case ErrorCode::kInvalidGrid: return "InvalidGrid";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kOutOfScale: return "OutOfScale";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kOracleFailure: return "OracleFailure";
    case ErrorCode::kIterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kPhiZero: return "PhiZero";
    case ErrorCode::kInconsistentAnswers: return "InconsistentAnswers";
    case ErrorCode::kNoValidReferencePair: return "NoValidReferencePair";
    case ErrorCode::kReplayDivergence: return "ReplayDivergence";
    case ErrorCode::kReplayExhausted: return "ReplayExhausted";
    case ErrorCode::kStateError: return "StateError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNoPending: return "NoPending";
    case ErrorCode::kSessionClosed: return "SessionClosed";
    case ErrorCode::kNotDone: return "NotDone";
  }
  return "Unknown";
}

/// Key/value diagnostics attached to an error (plane, rectangle, target...).
using ErrorContext = std::map<std::string, std::string>;

/// Every failure raised by the library. The code is stable and is what the
/// CLI and the HTTP service report; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, ErrorContext context = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message),
        context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const ErrorContext& context() const noexcept { return context_; }

  Error with_context(const std::string& key, const std::string& value) const {
    Error copy = *this;
    copy.context_.emplace(key, value);
    return copy;
  }

 private:
  ErrorCode code_;
  std::string message_;
  ErrorContext context_;
};

}  // namespace dualuta
