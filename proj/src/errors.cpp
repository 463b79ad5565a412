#include "psim/errors.hpp"

namespace psim {

const char* to_string(Err e) {
  switch (e) {
    case Err::ZeroAmount: return "ZeroAmount";
    case Err::UnknownIssuer: return "UnknownIssuer";
    case Err::UngatedPsiIssue: return "UngatedPsiIssue";
    case Err::InsufficientBalance: return "InsufficientBalance";
    case Err::SelfTransfer: return "SelfTransfer";
    case Err::WrongIssuer: return "WrongIssuer";
    case Err::AlreadyExhausted: return "AlreadyExhausted";
    case Err::UnknownClass: return "UnknownClass";
    case Err::UnknownAgent: return "UnknownAgent";
    case Err::GoodsUnavailable: return "GoodsUnavailable";
    case Err::MediumRejected: return "MediumRejected";
    case Err::NotOpen: return "NotOpen";
    case Err::WrongBearer: return "WrongBearer";
    case Err::DoubleCompletion: return "DoubleCompletion";
    case Err::UnknownGood: return "UnknownGood";
    case Err::ReserveLimitExceeded: return "ReserveLimitExceeded";
    case Err::UnknownBorrower: return "UnknownBorrower";
    case Err::VoteFailed: return "VoteFailed";
    case Err::DuplicateSpec: return "DuplicateSpec";
    case Err::NotRequested: return "NotRequested";
    case Err::AlreadyDelivered: return "AlreadyDelivered";
    case Err::NoServiceDemand: return "NoServiceDemand";
    case Err::AllZero: return "AllZero";
    case Err::DegenerateInput: return "DegenerateInput";
    case Err::MissingBase: return "MissingBase";
    case Err::ZeroOutstanding: return "ZeroOutstanding";
    case Err::MismatchedAgents: return "MismatchedAgents";
    case Err::SeriesTooShort: return "SeriesTooShort";
    case Err::SyntaxError: return "SyntaxError";
    case Err::MissingField: return "MissingField";
    case Err::UnknownKey: return "UnknownKey";
    case Err::RangeViolation: return "RangeViolation";
    case Err::InvalidConfig: return "InvalidConfig";
  }
  return "?";
}

SimError::SimError(Err code, const std::string& msg)
    : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

void fail(Err code, const std::string& msg) { throw SimError(code, msg); }

}  // namespace psim
