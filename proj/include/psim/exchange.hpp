#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "psim/agents.hpp"
#include "psim/goods.hpp"
#include "psim/instruments.hpp"
#include "psim/types.hpp"

namespace psim {

enum class Medium { Barter, Money, Iou, Invoice };
enum class ContractState { Open, Completed };

const char* to_string(Medium m);

// Two-part exchange: the first half moves goods one way, the second half is
// either immediate (barter, payment in circulating units) or deferred as a
// claim that stays Open until redeemed and destroyed.
struct ExchangeContract {
  std::int64_t id = -1;
  AgentId first_provider = kNoAgent;  // delivered the goods
  AgentId first_receiver = kNoAgent;  // got the goods, owes or paid the second half
  GoodId delivered_good = kNoGood;
  double delivered_qty = 0.0;
  GoodId counter_good = kNoGood;  // barter only
  double counter_qty = 0.0;
  Medium medium = Medium::Barter;
  ClassId cls = kNoClass;
  Count units = 0;      // instrument units issued or moved at settlement
  Count remaining = 0;  // claim units not yet redeemed; 0 for immediate media
  ContractState state = ContractState::Completed;
  Tick open_tick = 0;
  Tick close_tick = -1;
};

// honored/defaulted redemption record per issuer; the score is the posterior
// mean (h + 1) / (h + d + 2) so unknown issuers start at 0.5
class CredibilityBook {
 public:
  explicit CredibilityBook(std::size_t agents);
  double credibility(AgentId issuer) const;
  void record_honored(AgentId issuer);
  void record_defaulted(AgentId issuer);
  std::int64_t honored(AgentId issuer) const;
  std::int64_t defaulted(AgentId issuer) const;

 private:
  void require(AgentId a) const;
  std::vector<std::int64_t> honored_, defaulted_;
};

enum class TradeOutcome { Accepted, Refused, Inactive };

// per-good acceptance score in [baseline, 1]: accepted pulls toward 1,
// refused or inactive decays toward the baseline at the same rate
class MarketabilityTable {
 public:
  MarketabilityTable(std::size_t goods, double rate, double baseline, double initial);
  double score(GoodId g) const;
  std::int64_t updates(GoodId g) const;
  std::size_t size() const { return scores_.size(); }
  void apply(GoodId g, TradeOutcome outcome);

 private:
  void require(GoodId g) const;
  std::vector<double> scores_;
  std::vector<std::int64_t> updates_;
  double rate_, baseline_;
};

void marketability_update(MarketabilityTable& table, GoodId g, TradeOutcome outcome);

// what acceptance decisions are allowed to know about the world
struct RegimeContext {
  RegimeKind regime = RegimeKind::BarterOnly;
  bool legal_tender = false;
  double tax_rate = 0.0;
  const std::vector<std::uint8_t>* spec_delivered = nullptr;  // dense by SpecId
  const CredibilityBook* credibility = nullptr;
  const MarketabilityTable* marketability = nullptr;
};

enum class AcceptReason {
  BoundByContract,   // delivered PSI or own bilateral invoice
  LegalTender,
  CredibleIssuer,
  MarketableMoney,
  NotRequested,      // PSI whose spec was never delivered
  NoLegalTender,     // fiat outside an enforcing fiat regime
  LowCredibility,
  LowMarketability,
  NotCirculating,    // bilateral invoice shown to a third party
};

struct AcceptDecision {
  bool accepted = false;
  AcceptReason reason = AcceptReason::NotCirculating;
};

// pure: same agent, class and context always produce the same answer
AcceptDecision accept_decision(const Agent& payee, const InstrumentClass& cls,
                               const RegimeContext& ctx);

class ContractBook {
 public:
  // assigns the id; Open contracts join their class redemption queue
  ExchangeContract& add(ExchangeContract c);
  ExchangeContract& at(std::int64_t id);
  const ExchangeContract& at(std::int64_t id) const;
  bool stored(std::int64_t id) const;
  std::int64_t total_created() const { return next_id_; }

  // attribute destroyed units of a class to its open contracts, oldest first
  void attribute_destroyed(ClassId cls, Count units, Tick t);
  Count open_remaining(ClassId cls) const;
  std::vector<std::int64_t> open_ids(ClassId cls) const;
  void unqueue(ClassId cls, std::int64_t id);

  // when off, contracts completed at creation are only counted, and
  // completed claims are dropped; desk-scale runs keep everything
  void retain_completed(bool on) { retain_completed_ = on; }

 private:
  void index_open(const ExchangeContract& c);
  std::map<std::int64_t, ExchangeContract> contracts_;
  std::map<ClassId, std::deque<std::int64_t>> open_by_class_;
  std::int64_t next_id_ = 0;
  bool retain_completed_ = true;
};

struct MediumChoice {
  Medium medium = Medium::Barter;
  ClassId cls = kNoClass;   // class paid with, or issued into when issue_new
  Count units = 0;
  bool issue_new = false;   // Iou/Invoice: create fresh claim units
  GoodId counter_good = kNoGood;  // barter second half
  double counter_qty = 0.0;
};

// First half of an exchange: provider delivers goods to receiver, settlement
// per the medium. Fresh claims leave the contract Open; everything else
// completes immediately. Returns the contract id.
std::int64_t settle_first_half(ContractBook& book, Ledger& ledger, const GoodsCatalog& catalog,
                               Agent& provider, Agent& receiver, GoodId good, double qty,
                               const MediumChoice& choice, const RegimeContext& ctx, Tick t);

// Second half of a deferred exchange: the claim holder presents units, the
// counterparty delivers goods, units are destroyed and the contract closes
// when its remaining claim reaches zero.
void complete_exchange(ContractBook& book, Ledger& ledger, const GoodsCatalog& catalog,
                       std::int64_t contract_id, Agent& bearer, Agent& counterparty,
                       double redemption_qty, Count units, CredibilityBook* credibility, Tick t);

}  // namespace psim
