#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "psim/goods.hpp"
#include "psim/instruments.hpp"
#include "psim/types.hpp"

namespace psim {

// latent true values per good; agents only ever see these through their
// noise factors, decisions must not read this table directly
class ObjectiveValues {
 public:
  ObjectiveValues() = default;
  explicit ObjectiveValues(std::vector<double> per_good) : values_(std::move(per_good)) {}
  double at(GoodId g, Tick t) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct Agent {
  AgentId id = kNoAgent;
  Role role = Role::Household;
  GoodId specialty = kNoGood;           // kNoGood for pure system actors
  Bundle durables;                      // persists across ticks
  Bundle fresh;                         // this tick's perishables, expire at tick end
  std::vector<double> noise;            // per-good valuation factor, drawn once
  double public_noise = 1.0;            // valuation factor for public projects
  double time_preference = 0.9;         // discount on deferred value, in (0,1]
  double accept_threshold = 0.5;        // min credibility / marketability accepted

  double stock(GoodId g) const;
  void add_stock(GoodId g, double qty, bool durable);
  void take_stock(GoodId g, double qty);  // GoodsUnavailable if short
};

// sum over the bundle of qty x objective value x per-good noise factor
double subjective_value(const Agent& a, const ObjectiveValues& obj, const Bundle& bundle, Tick t);

// assets (inventory at objective value + holdings deflated by group price
// index) minus liabilities (own outstanding IOUs/invoices + fiat debt)
double equity(const Agent& a, const ObjectiveValues& obj, const Ledger& ledger,
              const std::array<double, kGroupCount>& price_index,
              std::span<const double> debt_by_agent, Tick t);

struct ActionCandidate {
  int tag = -1;       // caller meaning, returned by index so tags are opaque here
  double interest = 0.0;
  double cost = 0.0;
};

// picks the candidate with the highest interest - cost margin; acts only on
// strict interest > cost, ties between candidates resolve to the earlier one
std::optional<std::size_t> decide_action(std::span<const ActionCandidate> candidates);

// preference order for spending: invoice-backed claims (PSI, bilateral
// invoices) first, then IOUs, then money; under a taxing fiat regime the
// legal-tender currency jumps the non-invoice queue. Stable by class id
// within a rank.
std::vector<ClassId> spending_order(const Agent& a, std::vector<ClassId> options,
                                    const Ledger& ledger, RegimeKind regime,
                                    bool tax_currency_first);

}  // namespace psim
