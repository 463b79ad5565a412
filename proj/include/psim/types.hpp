#pragma once

#include <cstdint>

namespace psim {

using Tick = std::int64_t;
using AgentId = std::int32_t;
using GoodId = std::int32_t;
using ClassId = std::int32_t;
using SpecId = std::int32_t;
using Count = std::int64_t;  // instrument units; all ledger arithmetic is integral

inline constexpr AgentId kNoAgent = -1;
inline constexpr GoodId kNoGood = -1;
inline constexpr ClassId kNoClass = -1;
inline constexpr SpecId kNoSpec = -1;

enum class Role {
  Household,
  Firm,
  Bank,
  CentralBank,
  Government,
  PublicProvider,
};

enum class RegimeKind { BarterOnly, Psi, Fiat };

const char* to_string(Role r);
const char* to_string(RegimeKind k);

}  // namespace psim
