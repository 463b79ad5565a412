#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "psim/errors.hpp"
#include "psim/types.hpp"

namespace psim {

enum class InstrumentKind { CommodityMoney, Iou, Invoice, Psi, FiatNote, FiatCredit };

// aggregation buckets for price/velocity/distribution metrics;
// bilateral invoices ride with PSIs, both fiat kinds share one bucket
enum class Group { Commodity = 0, Iou = 1, Psi = 2, Fiat = 3 };
inline constexpr int kGroupCount = 4;

Group group_of(InstrumentKind k);
const char* to_string(InstrumentKind k);
const char* to_string(Group g);

struct InstrumentClass {
  ClassId id = kNoClass;
  InstrumentKind kind = InstrumentKind::Iou;
  AgentId issuer = kNoAgent;      // required except CommodityMoney, where it is forbidden
  AgentId collector = kNoAgent;   // who may take redemptions; defaults to issuer
  AgentId obligor = kNoAgent;     // bilateral invoice: the party bound to accept it back
  std::string backing;            // good or service descriptor
  GoodId backing_good = kNoGood;  // set for CommodityMoney and good-backed claims
  SpecId spec = kNoSpec;          // Psi: public-project spec
  Count denomination = 1;         // value units per ledger unit, > 0
};

struct InstrumentBatch {
  Count issued = 0;     // monotone non-decreasing
  Count destroyed = 0;  // monotone non-decreasing, <= issued
  Tick first_issue_tick = 0;
  Count outstanding() const { return issued - destroyed; }
};

enum class EventKind { Issue, Transfer, Destroy };

struct LedgerEvent {
  Tick tick = 0;
  EventKind kind = EventKind::Issue;
  ClassId cls = kNoClass;
  AgentId from = kNoAgent;  // kNoAgent on issues
  AgentId to = kNoAgent;    // kNoAgent on destroys
  Count amount = 0;
};

// Every unit of every instrument class, from issue to destruction. Balances
// are integral and conservation (sum of balances == issued - destroyed, per
// class) holds after every operation. Destroyed units never come back: there
// is no operation that decrements `destroyed` or credits a balance without an
// issue or a funded transfer.
class Ledger {
 public:
  Ledger(std::size_t agent_count, std::size_t good_count);

  // validates the class and assigns its id
  ClassId register_class(InstrumentClass cls);

  // registers cls if cls.id == kNoClass, then issues; returns the class id
  ClassId issue(const InstrumentClass& cls, AgentId recipient, Count amount, Tick t);
  ClassId issue(ClassId cls, AgentId recipient, Count amount, Tick t);
  void transfer(AgentId from, AgentId to, ClassId cls, Count amount, Tick t);
  // presented_to must be the class collector (issuer unless delegated)
  void redeem_destroy(AgentId bearer, ClassId cls, Count amount, AgentId presented_to, Tick t);

  Count outstanding(ClassId cls) const;
  Count balance(AgentId a, ClassId cls) const;
  const InstrumentClass& instrument(ClassId cls) const;
  const InstrumentBatch& batch(ClassId cls) const;
  std::size_t class_count() const { return classes_.size(); }
  std::size_t agent_count() const { return balances_.size(); }

  // wallet holds only strictly positive balances, keyed by class id
  const std::map<ClassId, Count>& wallet(AgentId a) const;

  // value units (count x denomination) aggregated per group
  double balance_value(AgentId a, Group g) const;
  Count outstanding_units(Group g) const { return group_units_[static_cast<int>(g)]; }
  double outstanding_value(Group g) const { return group_value_[static_cast<int>(g)]; }

  // value units of a's own outstanding liabilities of the given kind
  double issued_liability_value(AgentId a, InstrumentKind k) const;

  // PSI issuance is refused unless a gate installed by the governing regime
  // approves (spec delivered, allowance not exceeded)
  void set_psi_gate(std::function<bool(const InstrumentClass&, Count)> gate);

  void set_event_sink(std::function<void(const LedgerEvent&)> sink);
  void retain_events(bool on) { retain_ = on; }
  const std::vector<LedgerEvent>& events() const { return events_; }

  // recomputes per-class balance sums from scratch and compares with batches
  void check_conservation() const;

  static std::string csv_header();  // tick,event-kind,class-id,from,to,amount
  static void append_csv(std::string& out, const LedgerEvent& ev);

 private:
  void require_agent(AgentId a, const char* what) const;
  const InstrumentClass& require_class(ClassId cls) const;
  void credit(AgentId a, ClassId cls, Count amount);
  void debit(AgentId a, ClassId cls, Count amount);
  void record(Tick t, EventKind k, ClassId cls, AgentId from, AgentId to, Count amount);

  std::size_t good_count_;
  std::vector<InstrumentClass> classes_;
  std::vector<InstrumentBatch> batches_;
  std::vector<std::map<ClassId, Count>> balances_;  // per agent, zero entries erased
  std::array<Count, kGroupCount> group_units_{};
  std::array<double, kGroupCount> group_value_{};
  std::function<bool(const InstrumentClass&, Count)> psi_gate_;
  std::function<void(const LedgerEvent&)> sink_;
  std::vector<LedgerEvent> events_;
  bool retain_ = true;
};

}  // namespace psim
