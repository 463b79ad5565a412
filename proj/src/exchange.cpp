#include "psim/exchange.hpp"

#include <algorithm>

namespace psim {

const char* to_string(Medium m) {
  switch (m) {
    case Medium::Barter: return "barter";
    case Medium::Money: return "money";
    case Medium::Iou: return "iou";
    case Medium::Invoice: return "invoice";
  }
  return "?";
}

CredibilityBook::CredibilityBook(std::size_t agents) : honored_(agents, 0), defaulted_(agents, 0) {}

void CredibilityBook::require(AgentId a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= honored_.size())
    fail(Err::UnknownAgent, "issuer " + std::to_string(a));
}

double CredibilityBook::credibility(AgentId issuer) const {
  require(issuer);
  auto i = static_cast<std::size_t>(issuer);
  return static_cast<double>(honored_[i] + 1) / static_cast<double>(honored_[i] + defaulted_[i] + 2);
}

void CredibilityBook::record_honored(AgentId issuer) {
  require(issuer);
  ++honored_[static_cast<std::size_t>(issuer)];
}

void CredibilityBook::record_defaulted(AgentId issuer) {
  require(issuer);
  ++defaulted_[static_cast<std::size_t>(issuer)];
}

std::int64_t CredibilityBook::honored(AgentId issuer) const {
  require(issuer);
  return honored_[static_cast<std::size_t>(issuer)];
}

std::int64_t CredibilityBook::defaulted(AgentId issuer) const {
  require(issuer);
  return defaulted_[static_cast<std::size_t>(issuer)];
}

MarketabilityTable::MarketabilityTable(std::size_t goods, double rate, double baseline,
                                       double initial)
    : scores_(goods, initial), updates_(goods, 0), rate_(rate), baseline_(baseline) {
  if (rate < 0.0 || rate > 1.0) fail(Err::RangeViolation, "marketability rate in [0,1]");
  if (baseline < 0.0 || baseline > 1.0) fail(Err::RangeViolation, "marketability baseline in [0,1]");
  if (initial < 0.0 || initial > 1.0) fail(Err::RangeViolation, "marketability initial in [0,1]");
}

void MarketabilityTable::require(GoodId g) const {
  if (g < 0 || static_cast<std::size_t>(g) >= scores_.size())
    fail(Err::UnknownGood, "good id " + std::to_string(g));
}

double MarketabilityTable::score(GoodId g) const {
  require(g);
  return scores_[static_cast<std::size_t>(g)];
}

std::int64_t MarketabilityTable::updates(GoodId g) const {
  require(g);
  return updates_[static_cast<std::size_t>(g)];
}

void MarketabilityTable::apply(GoodId g, TradeOutcome outcome) {
  require(g);
  auto i = static_cast<std::size_t>(g);
  double target = outcome == TradeOutcome::Accepted ? 1.0 : baseline_;
  scores_[i] += rate_ * (target - scores_[i]);
  ++updates_[i];
}

void marketability_update(MarketabilityTable& table, GoodId g, TradeOutcome outcome) {
  table.apply(g, outcome);
}

AcceptDecision accept_decision(const Agent& payee, const InstrumentClass& cls,
                               const RegimeContext& ctx) {
  switch (cls.kind) {
    case InstrumentKind::Psi: {
      bool delivered = ctx.spec_delivered && cls.spec >= 0 &&
                       static_cast<std::size_t>(cls.spec) < ctx.spec_delivered->size() &&
                       (*ctx.spec_delivered)[static_cast<std::size_t>(cls.spec)];
      if (delivered) return {true, AcceptReason::BoundByContract};
      return {false, AcceptReason::NotRequested};
    }
    case InstrumentKind::FiatNote:
    case InstrumentKind::FiatCredit:
      if (ctx.regime == RegimeKind::Fiat && ctx.legal_tender)
        return {true, AcceptReason::LegalTender};
      return {false, AcceptReason::NoLegalTender};
    case InstrumentKind::Iou: {
      double cred = ctx.credibility ? ctx.credibility->credibility(cls.issuer) : 0.0;
      if (cred >= payee.accept_threshold) return {true, AcceptReason::CredibleIssuer};
      return {false, AcceptReason::LowCredibility};
    }
    case InstrumentKind::CommodityMoney: {
      double m = ctx.marketability ? ctx.marketability->score(cls.backing_good) : 0.0;
      if (m >= payee.accept_threshold) return {true, AcceptReason::MarketableMoney};
      return {false, AcceptReason::LowMarketability};
    }
    case InstrumentKind::Invoice:
      if (payee.id != kNoAgent && payee.id == cls.obligor)
        return {true, AcceptReason::BoundByContract};
      return {false, AcceptReason::NotCirculating};
  }
  return {false, AcceptReason::NotCirculating};
}

ExchangeContract& ContractBook::add(ExchangeContract c) {
  c.id = next_id_++;
  if (c.state == ContractState::Open) {
    auto [it, ok] = contracts_.emplace(c.id, std::move(c));
    (void)ok;
    index_open(it->second);
    return it->second;
  }
  if (retain_completed_) {
    auto [it, ok] = contracts_.emplace(c.id, std::move(c));
    (void)ok;
    return it->second;
  }
  static ExchangeContract scratch;  // not stored; caller only reads the id
  scratch = std::move(c);
  return scratch;
}

void ContractBook::index_open(const ExchangeContract& c) {
  open_by_class_[c.cls].push_back(c.id);
}

ExchangeContract& ContractBook::at(std::int64_t id) {
  auto it = contracts_.find(id);
  if (it == contracts_.end()) fail(Err::NotOpen, "contract " + std::to_string(id));
  return it->second;
}

const ExchangeContract& ContractBook::at(std::int64_t id) const {
  auto it = contracts_.find(id);
  if (it == contracts_.end()) fail(Err::NotOpen, "contract " + std::to_string(id));
  return it->second;
}

bool ContractBook::stored(std::int64_t id) const { return contracts_.count(id) != 0; }

void ContractBook::attribute_destroyed(ClassId cls, Count units, Tick t) {
  auto qit = open_by_class_.find(cls);
  if (qit == open_by_class_.end()) return;
  auto& queue = qit->second;
  while (units > 0 && !queue.empty()) {
    auto cit = contracts_.find(queue.front());
    if (cit == contracts_.end()) {
      queue.pop_front();
      continue;
    }
    ExchangeContract& c = cit->second;
    Count take = std::min(units, c.remaining);
    c.remaining -= take;
    units -= take;
    if (c.remaining == 0) {
      c.state = ContractState::Completed;
      c.close_tick = t;
      queue.pop_front();
      if (!retain_completed_) contracts_.erase(cit);
    }
  }
  if (queue.empty()) open_by_class_.erase(qit);
}

Count ContractBook::open_remaining(ClassId cls) const {
  auto qit = open_by_class_.find(cls);
  if (qit == open_by_class_.end()) return 0;
  Count total = 0;
  for (std::int64_t id : qit->second) {
    auto cit = contracts_.find(id);
    if (cit != contracts_.end()) total += cit->second.remaining;
  }
  return total;
}

std::vector<std::int64_t> ContractBook::open_ids(ClassId cls) const {
  auto qit = open_by_class_.find(cls);
  if (qit == open_by_class_.end()) return {};
  return {qit->second.begin(), qit->second.end()};
}

void ContractBook::unqueue(ClassId cls, std::int64_t id) {
  auto qit = open_by_class_.find(cls);
  if (qit == open_by_class_.end()) return;
  auto& queue = qit->second;
  queue.erase(std::remove(queue.begin(), queue.end(), id), queue.end());
  if (queue.empty()) open_by_class_.erase(qit);
}

std::int64_t settle_first_half(ContractBook& book, Ledger& ledger, const GoodsCatalog& catalog,
                               Agent& provider, Agent& receiver, GoodId good, double qty,
                               const MediumChoice& choice, const RegimeContext& ctx, Tick t) {
  const Good& spec = catalog.at(good);
  if (qty <= 0.0) fail(Err::ZeroAmount, "delivery of " + std::to_string(qty));
  if (provider.stock(good) + 1e-9 < qty)
    fail(Err::GoodsUnavailable, "provider " + std::to_string(provider.id) + " short of " +
                                    spec.name);

  ExchangeContract c;
  c.first_provider = provider.id;
  c.first_receiver = receiver.id;
  c.delivered_good = good;
  c.delivered_qty = qty;
  c.medium = choice.medium;
  c.open_tick = t;

  switch (choice.medium) {
    case Medium::Barter: {
      const Good& counter = catalog.at(choice.counter_good);
      if (receiver.stock(choice.counter_good) + 1e-9 < choice.counter_qty)
        fail(Err::GoodsUnavailable, "receiver " + std::to_string(receiver.id) + " short of " +
                                        counter.name);
      provider.take_stock(good, qty);
      receiver.add_stock(good, qty, spec.durable);
      receiver.take_stock(choice.counter_good, choice.counter_qty);
      provider.add_stock(choice.counter_good, choice.counter_qty, counter.durable);
      c.counter_good = choice.counter_good;
      c.counter_qty = choice.counter_qty;
      c.state = ContractState::Completed;
      c.close_tick = t;
      break;
    }
    case Medium::Money:
    case Medium::Iou:
    case Medium::Invoice: {
      if (choice.units <= 0) fail(Err::ZeroAmount, "payment of 0 units");
      const InstrumentClass& cls = ledger.instrument(choice.cls);
      c.cls = cls.id;
      c.units = choice.units;
      if (choice.issue_new) {
        // receiver issues a fresh IOU, or the provider writes itself an
        // invoice the receiver is bound to take back
        AcceptDecision d = accept_decision(provider, cls, ctx);
        if (choice.medium == Medium::Iou && !d.accepted)
          fail(Err::MediumRejected, std::string("iou refused: ") + std::to_string(cls.issuer));
        provider.take_stock(good, qty);
        receiver.add_stock(good, qty, spec.durable);
        ledger.issue(cls.id, provider.id, choice.units, t);
        c.remaining = choice.units;
        c.state = ContractState::Open;
      } else {
        AcceptDecision d = accept_decision(provider, cls, ctx);
        if (!d.accepted)
          fail(Err::MediumRejected, std::string(to_string(cls.kind)) + " class " +
                                        std::to_string(cls.id) + " refused");
        provider.take_stock(good, qty);
        receiver.add_stock(good, qty, spec.durable);
        ledger.transfer(receiver.id, provider.id, cls.id, choice.units, t);
        c.state = ContractState::Completed;
        c.close_tick = t;
      }
      break;
    }
  }
  return book.add(std::move(c)).id;
}

void complete_exchange(ContractBook& book, Ledger& ledger, const GoodsCatalog& catalog,
                       std::int64_t contract_id, Agent& bearer, Agent& counterparty,
                       double redemption_qty, Count units, CredibilityBook* credibility, Tick t) {
  ExchangeContract& c = book.at(contract_id);
  if (c.state == ContractState::Completed)
    fail(Err::DoubleCompletion, "contract " + std::to_string(contract_id) + " already completed");
  if (c.medium == Medium::Barter || c.units == 0 || c.cls == kNoClass)
    fail(Err::NotOpen, "contract " + std::to_string(contract_id) + " carries no claim");
  if (units <= 0) fail(Err::ZeroAmount, "redeem of 0 units");
  if (units > c.remaining)
    fail(Err::RangeViolation, "contract " + std::to_string(contract_id) + " has " +
                                  std::to_string(c.remaining) + " units open, got " +
                                  std::to_string(units));
  if (ledger.balance(bearer.id, c.cls) < units)
    fail(Err::WrongBearer, "agent " + std::to_string(bearer.id) + " does not hold " +
                               std::to_string(units) + " units of class " + std::to_string(c.cls));
  const InstrumentClass& cls = ledger.instrument(c.cls);
  // the claim redeems in the issuer's backing good when one is named,
  // otherwise in whatever the first half delivered
  GoodId pay_good = cls.backing_good != kNoGood ? cls.backing_good : c.delivered_good;
  if (redemption_qty > 0.0) {
    const Good& rg = catalog.at(pay_good);
    if (counterparty.stock(pay_good) + 1e-9 < redemption_qty)
      fail(Err::GoodsUnavailable, "counterparty short of " + rg.name);
    counterparty.take_stock(pay_good, redemption_qty);
    bearer.add_stock(pay_good, redemption_qty, rg.durable);
  }
  ledger.redeem_destroy(bearer.id, c.cls, units, cls.collector, t);
  c.remaining -= units;
  if (c.remaining == 0) {
    c.state = ContractState::Completed;
    c.close_tick = t;
    book.unqueue(c.cls, c.id);
  }
  if (credibility && cls.kind == InstrumentKind::Iou) credibility->record_honored(cls.issuer);
}

}  // namespace psim
