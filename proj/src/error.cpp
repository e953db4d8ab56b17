#include "rcpor/error.hpp"

namespace rcpor {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnequalBlockLength: return "UnequalBlockLength";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kBadRandomnessLength: return "BadRandomnessLength";
    case ErrorCode::kBadKeyLength: return "BadKeyLength";
    case ErrorCode::kDecryptFailure: return "DecryptFailure";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kParamMismatch: return "ParamMismatch";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kUnknownAddress: return "UnknownAddress";
    case ErrorCode::kInsufficientBalance: return "InsufficientBalance";
    case ErrorCode::kOutOfWindow: return "OutOfWindow";
    case ErrorCode::kWrongSender: return "WrongSender";
    case ErrorCode::kDuplicateSlot: return "DuplicateSlot";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kUnbalanced: return "Unbalanced";
    case ErrorCode::kAlreadyPaid: return "AlreadyPaid";
    case ErrorCode::kInvalidSchedule: return "InvalidSchedule";
    case ErrorCode::kUnknownContract: return "UnknownContract";
    case ErrorCode::kPriceNotInList: return "PriceNotInList";
    case ErrorCode::kBadOpening: return "BadOpening";
    case ErrorCode::kRefundPath: return "RefundPath";
    case ErrorCode::kMissingQuery: return "MissingQuery";
    case ErrorCode::kMalformedStatement: return "MalformedStatement";
    case ErrorCode::kSpecInvalid: return "SpecInvalid";
    case ErrorCode::kCounterOutOfBounds: return "CounterOutOfBounds";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace rcpor
