// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cannedbot {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidSpec,
  kEmptyDialogue,
  kShapeMismatch,
  kNonFiniteValue,
  kNonScalarLoss,
  kTokenOutOfRange,
  kEmptyContext,
  kWindowTooShort,
  kBatchTooSmall,
  kClassCountMismatch,
  kEmptyDataset,
  kTooFewPoints,
  kTooFewUniqueUtterances,
  kSingleClass,
  kKTooLarge,
  kEmptyInput,
  kChecksumMismatch,
  kTooFewCases,
  kMalformedRequest,
  kModelUnavailable,
  kUnknownRequestId,
  kDuplicateResponse,
  kObjectiveNotExtensible,
  kValidation,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure mode named by a module contract
/// maps to one ErrorCode so callers (and tests) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kEmptyDialogue: return "EmptyDialogue";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kNonScalarLoss: return "NonScalarLoss";
    case ErrorCode::kTokenOutOfRange: return "TokenOutOfRange";
    case ErrorCode::kEmptyContext: return "EmptyContext";
    case ErrorCode::kWindowTooShort: return "WindowTooShort";
    case ErrorCode::kBatchTooSmall: return "BatchTooSmall";
    case ErrorCode::kClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kTooFewUniqueUtterances: return "TooFewUniqueUtterances";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kTooFewCases: return "TooFewCases";
    case ErrorCode::kMalformedRequest: return "MalformedRequest";
    case ErrorCode::kModelUnavailable: return "ModelUnavailable";
    case ErrorCode::kUnknownRequestId: return "UnknownRequestId";
    case ErrorCode::kDuplicateResponse: return "DuplicateResponse";
    case ErrorCode::kObjectiveNotExtensible: return "ObjectiveNotExtensible";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace cannedbot
