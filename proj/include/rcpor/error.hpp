#pragma once

#include <stdexcept>
#include <string>

namespace rcpor {

enum class ErrorCode {
  kEmptyInput = 1,
  kUnequalBlockLength,
  kIndexOutOfRange,
  kBadRandomnessLength,
  kBadKeyLength,
  kDecryptFailure,
  kEmptyFile,
  kParamMismatch,
  kInvalidParams,
  kUnknownAddress,
  kInsufficientBalance,
  kOutOfWindow,
  kWrongSender,
  kDuplicateSlot,
  kNonMonotonicTime,
  kUnbalanced,
  kAlreadyPaid,
  kInvalidSchedule,
  kUnknownContract,
  kPriceNotInList,
  kBadOpening,
  kRefundPath,
  kMissingQuery,
  kMalformedStatement,
  kSpecInvalid,
  kCounterOutOfBounds,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rcpor
