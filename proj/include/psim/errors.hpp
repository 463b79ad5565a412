#pragma once

#include <stdexcept>
#include <string>

namespace psim {

enum class Err {
  // ledger
  ZeroAmount,
  UnknownIssuer,
  UngatedPsiIssue,
  InsufficientBalance,
  SelfTransfer,
  WrongIssuer,
  AlreadyExhausted,
  UnknownClass,
  UnknownAgent,
  // exchange
  GoodsUnavailable,
  MediumRejected,
  NotOpen,
  WrongBearer,
  DoubleCompletion,
  UnknownGood,
  // regimes
  ReserveLimitExceeded,
  UnknownBorrower,
  VoteFailed,
  DuplicateSpec,
  NotRequested,
  AlreadyDelivered,
  NoServiceDemand,
  // metrics
  AllZero,
  DegenerateInput,
  MissingBase,
  ZeroOutstanding,
  MismatchedAgents,
  SeriesTooShort,
  // scenario / config
  SyntaxError,
  MissingField,
  UnknownKey,
  RangeViolation,
  InvalidConfig,
};

const char* to_string(Err e);

class SimError : public std::runtime_error {
 public:
  SimError(Err code, const std::string& msg);
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& msg);

}  // namespace psim
