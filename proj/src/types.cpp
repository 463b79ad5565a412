#include "psim/types.hpp"

namespace psim {

const char* to_string(Role r) {
  switch (r) {
    case Role::Household: return "household";
    case Role::Firm: return "firm";
    case Role::Bank: return "bank";
    case Role::CentralBank: return "central-bank";
    case Role::Government: return "government";
    case Role::PublicProvider: return "public-provider";
  }
  return "?";
}

const char* to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::BarterOnly: return "barter";
    case RegimeKind::Psi: return "psi";
    case RegimeKind::Fiat: return "fiat";
  }
  return "?";
}

}  // namespace psim
