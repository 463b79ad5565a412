#include "psim/instruments.hpp"

#include <cstdio>

namespace psim {

Group group_of(InstrumentKind k) {
  switch (k) {
    case InstrumentKind::CommodityMoney: return Group::Commodity;
    case InstrumentKind::Iou: return Group::Iou;
    case InstrumentKind::Invoice:
    case InstrumentKind::Psi: return Group::Psi;
    case InstrumentKind::FiatNote:
    case InstrumentKind::FiatCredit: return Group::Fiat;
  }
  return Group::Commodity;
}

const char* to_string(InstrumentKind k) {
  switch (k) {
    case InstrumentKind::CommodityMoney: return "commodity-money";
    case InstrumentKind::Iou: return "iou";
    case InstrumentKind::Invoice: return "invoice";
    case InstrumentKind::Psi: return "psi";
    case InstrumentKind::FiatNote: return "fiat-note";
    case InstrumentKind::FiatCredit: return "fiat-credit";
  }
  return "?";
}

const char* to_string(Group g) {
  switch (g) {
    case Group::Commodity: return "commodity";
    case Group::Iou: return "iou";
    case Group::Psi: return "psi";
    case Group::Fiat: return "fiat";
  }
  return "?";
}

Ledger::Ledger(std::size_t agent_count, std::size_t good_count)
    : good_count_(good_count), balances_(agent_count) {}

void Ledger::require_agent(AgentId a, const char* what) const {
  if (a < 0 || static_cast<std::size_t>(a) >= balances_.size())
    fail(Err::UnknownAgent, std::string(what) + " " + std::to_string(a));
}

const InstrumentClass& Ledger::require_class(ClassId cls) const {
  if (cls < 0 || static_cast<std::size_t>(cls) >= classes_.size())
    fail(Err::UnknownClass, "class " + std::to_string(cls));
  return classes_[static_cast<std::size_t>(cls)];
}

ClassId Ledger::register_class(InstrumentClass cls) {
  if (cls.denomination <= 0)
    fail(Err::RangeViolation, "denomination must be > 0, got " + std::to_string(cls.denomination));
  if (cls.kind == InstrumentKind::CommodityMoney) {
    if (cls.issuer != kNoAgent)
      fail(Err::UnknownIssuer, "commodity money has no issuer");
    if (cls.backing_good < 0 || static_cast<std::size_t>(cls.backing_good) >= good_count_)
      fail(Err::UnknownGood, "commodity money must reference a catalog good");
  } else {
    if (cls.issuer < 0 || static_cast<std::size_t>(cls.issuer) >= balances_.size())
      fail(Err::UnknownIssuer, "issuer " + std::to_string(cls.issuer));
  }
  if (cls.collector == kNoAgent) cls.collector = cls.issuer;
  cls.id = static_cast<ClassId>(classes_.size());
  classes_.push_back(std::move(cls));
  batches_.push_back(InstrumentBatch{});
  return classes_.back().id;
}

ClassId Ledger::issue(const InstrumentClass& cls, AgentId recipient, Count amount, Tick t) {
  ClassId id = cls.id == kNoClass ? register_class(cls) : require_class(cls.id).id;
  return issue(id, recipient, amount, t);
}

ClassId Ledger::issue(ClassId cls, AgentId recipient, Count amount, Tick t) {
  const InstrumentClass& c = require_class(cls);
  if (amount <= 0) fail(Err::ZeroAmount, "issue of " + std::to_string(amount));
  require_agent(recipient, "recipient");
  if (c.kind == InstrumentKind::Psi) {
    if (!psi_gate_ || !psi_gate_(c, amount))
      fail(Err::UngatedPsiIssue, "psi issue for spec " + std::to_string(c.spec) + " not approved");
  }
  InstrumentBatch& b = batches_[static_cast<std::size_t>(cls)];
  if (b.issued == 0) b.first_issue_tick = t;
  b.issued += amount;
  credit(recipient, cls, amount);
  int g = static_cast<int>(group_of(c.kind));
  group_units_[g] += amount;
  group_value_[g] += static_cast<double>(amount * c.denomination);
  record(t, EventKind::Issue, cls, kNoAgent, recipient, amount);
  return cls;
}

void Ledger::transfer(AgentId from, AgentId to, ClassId cls, Count amount, Tick t) {
  const InstrumentClass& c = require_class(cls);
  (void)c;
  if (amount <= 0) fail(Err::ZeroAmount, "transfer of " + std::to_string(amount));
  require_agent(from, "sender");
  require_agent(to, "recipient");
  if (from == to) fail(Err::SelfTransfer, "agent " + std::to_string(from));
  debit(from, cls, amount);
  credit(to, cls, amount);
  record(t, EventKind::Transfer, cls, from, to, amount);
}

void Ledger::redeem_destroy(AgentId bearer, ClassId cls, Count amount, AgentId presented_to, Tick t) {
  const InstrumentClass& c = require_class(cls);
  if (amount <= 0) fail(Err::ZeroAmount, "redeem of " + std::to_string(amount));
  require_agent(bearer, "bearer");
  InstrumentBatch& b = batches_[static_cast<std::size_t>(cls)];
  if (b.outstanding() == 0)
    fail(Err::AlreadyExhausted, "class " + std::to_string(cls) + " has no outstanding units");
  if (presented_to != c.collector && presented_to != c.issuer)
    fail(Err::WrongIssuer, "class " + std::to_string(cls) + " redeems at agent " +
                               std::to_string(c.collector) + ", presented to " +
                               std::to_string(presented_to));
  debit(bearer, cls, amount);
  b.destroyed += amount;
  int g = static_cast<int>(group_of(c.kind));
  group_units_[g] -= amount;
  group_value_[g] -= static_cast<double>(amount * c.denomination);
  record(t, EventKind::Destroy, cls, bearer, kNoAgent, amount);
}

Count Ledger::outstanding(ClassId cls) const {
  require_class(cls);
  return batches_[static_cast<std::size_t>(cls)].outstanding();
}

Count Ledger::balance(AgentId a, ClassId cls) const {
  require_agent(a, "agent");
  require_class(cls);
  const auto& w = balances_[static_cast<std::size_t>(a)];
  auto it = w.find(cls);
  return it == w.end() ? 0 : it->second;
}

const InstrumentClass& Ledger::instrument(ClassId cls) const { return require_class(cls); }

const InstrumentBatch& Ledger::batch(ClassId cls) const {
  require_class(cls);
  return batches_[static_cast<std::size_t>(cls)];
}

const std::map<ClassId, Count>& Ledger::wallet(AgentId a) const {
  require_agent(a, "agent");
  return balances_[static_cast<std::size_t>(a)];
}

double Ledger::balance_value(AgentId a, Group g) const {
  require_agent(a, "agent");
  double v = 0.0;
  for (const auto& [cls, units] : balances_[static_cast<std::size_t>(a)]) {
    const InstrumentClass& c = classes_[static_cast<std::size_t>(cls)];
    if (group_of(c.kind) == g) v += static_cast<double>(units * c.denomination);
  }
  return v;
}

double Ledger::issued_liability_value(AgentId a, InstrumentKind k) const {
  require_agent(a, "agent");
  double v = 0.0;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].issuer == a && classes_[i].kind == k)
      v += static_cast<double>(batches_[i].outstanding() * classes_[i].denomination);
  }
  return v;
}

void Ledger::set_psi_gate(std::function<bool(const InstrumentClass&, Count)> gate) {
  psi_gate_ = std::move(gate);
}

void Ledger::set_event_sink(std::function<void(const LedgerEvent&)> sink) {
  sink_ = std::move(sink);
}

void Ledger::credit(AgentId a, ClassId cls, Count amount) {
  balances_[static_cast<std::size_t>(a)][cls] += amount;
}

void Ledger::debit(AgentId a, ClassId cls, Count amount) {
  auto& w = balances_[static_cast<std::size_t>(a)];
  auto it = w.find(cls);
  Count have = it == w.end() ? 0 : it->second;
  if (have < amount)
    fail(Err::InsufficientBalance, "agent " + std::to_string(a) + " holds " +
                                       std::to_string(have) + " of class " + std::to_string(cls) +
                                       ", needs " + std::to_string(amount));
  if (have == amount)
    w.erase(it);
  else
    it->second = have - amount;
}

void Ledger::record(Tick t, EventKind k, ClassId cls, AgentId from, AgentId to, Count amount) {
  LedgerEvent ev{t, k, cls, from, to, amount};
  if (retain_) events_.push_back(ev);
  if (sink_) sink_(ev);
}

void Ledger::check_conservation() const {
  std::vector<Count> sums(classes_.size(), 0);
  for (const auto& w : balances_)
    for (const auto& [cls, units] : w) {
      if (units < 0) fail(Err::InvalidConfig, "negative balance");
      sums[static_cast<std::size_t>(cls)] += units;
    }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const InstrumentBatch& b = batches_[i];
    if (b.issued < 0 || b.destroyed < 0 || b.destroyed > b.issued)
      fail(Err::InvalidConfig, "batch counters corrupt for class " + std::to_string(i));
    if (sums[i] != b.outstanding())
      fail(Err::InvalidConfig, "conservation broken for class " + std::to_string(i) + ": sum " +
                                   std::to_string(sums[i]) + " vs outstanding " +
                                   std::to_string(b.outstanding()));
  }
}

std::string Ledger::csv_header() { return "tick,event-kind,class-id,from,to,amount\n"; }

void Ledger::append_csv(std::string& out, const LedgerEvent& ev) {
  const char* kind = ev.kind == EventKind::Issue      ? "issue"
                     : ev.kind == EventKind::Transfer ? "transfer"
                                                      : "destroy";
  char buf[96];
  int n = std::snprintf(buf, sizeof buf, "%lld,%s,%d,", static_cast<long long>(ev.tick), kind,
                        ev.cls);
  out.append(buf, static_cast<std::size_t>(n));
  if (ev.from != kNoAgent) out.append(std::to_string(ev.from));
  out.push_back(',');
  if (ev.to != kNoAgent) out.append(std::to_string(ev.to));
  out.push_back(',');
  out.append(std::to_string(ev.amount));
  out.push_back('\n');
}

}  // namespace psim
