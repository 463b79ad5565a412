#include "psim/regimes.hpp"

#include <algorithm>
#include <cmath>

namespace psim {

Count FiatState::fiat_outstanding(const Ledger& ledger) const {
  return ledger.outstanding_units(Group::Fiat);
}

LoanRecord& fiat_expand_credit(FiatState& st, Ledger& ledger, AgentId bank, AgentId borrower,
                               Count amount, Tick t) {
  if (amount <= 0) fail(Err::ZeroAmount, "loan of " + std::to_string(amount));
  if (borrower < 0 || static_cast<std::size_t>(borrower) >= ledger.agent_count())
    fail(Err::UnknownBorrower, "borrower " + std::to_string(borrower));
  Count ceiling = static_cast<Count>(
      std::floor(static_cast<double>(st.reserves) * st.params.reserve_ratio_max));
  Count out = st.fiat_outstanding(ledger);
  if (out + amount > ceiling)
    fail(Err::ReserveLimitExceeded, "outstanding " + std::to_string(out) + " + " +
                                        std::to_string(amount) + " exceeds " +
                                        std::to_string(ceiling));
  ledger.issue(st.credit_class, borrower, amount, t);
  st.loans.push_back(LoanRecord{bank, borrower, amount, 0.0, t});
  if (static_cast<std::size_t>(borrower) < st.debt_by_agent.size())
    st.debt_by_agent[static_cast<std::size_t>(borrower)] += static_cast<double>(amount);
  return st.loans.back();
}

Count fiat_collect_taxes(FiatState& st, Ledger& ledger, AgentId payer, double trade_value_fiat,
                         Tick t) {
  if (trade_value_fiat < 0.0) fail(Err::RangeViolation, "negative trade value");
  if (payer < 0 || static_cast<std::size_t>(payer) >= st.tax_accrual.size())
    fail(Err::UnknownAgent, "payer " + std::to_string(payer));
  st.tax_accrual[static_cast<std::size_t>(payer)] += st.params.tax_rate * trade_value_fiat;
  double& due = st.tax_accrual[static_cast<std::size_t>(payer)];
  Count whole = static_cast<Count>(std::floor(due + 1e-9));
  if (whole <= 0) return 0;
  Count note = ledger.balance(payer, st.note_class);
  Count credit = ledger.balance(payer, st.credit_class);
  Count collected = 0;
  Count from_note = std::min(whole, note);
  if (from_note > 0) {
    ledger.transfer(payer, st.government, st.note_class, from_note, t);
    collected += from_note;
  }
  Count from_credit = std::min(whole - collected, credit);
  if (from_credit > 0) {
    ledger.transfer(payer, st.government, st.credit_class, from_credit, t);
    collected += from_credit;
  }
  due -= static_cast<double>(collected);
  return collected;
}

double fiat_tax_goods_fallback(FiatState& st, Agent& payer, Agent& government,
                               const GoodsCatalog& catalog,
                               const std::vector<double>& posted_fiat_price) {
  if (payer.id < 0 || static_cast<std::size_t>(payer.id) >= st.tax_accrual.size())
    fail(Err::UnknownAgent, "payer " + std::to_string(payer.id));
  double& due = st.tax_accrual[static_cast<std::size_t>(payer.id)];
  if (due < 1.0) return 0.0;
  double taken_value = 0.0;
  for (GoodId g = 0; static_cast<std::size_t>(g) < catalog.size() && due >= 1.0; ++g) {
    double price = static_cast<std::size_t>(g) < posted_fiat_price.size()
                       ? posted_fiat_price[static_cast<std::size_t>(g)]
                       : catalog.at(g).cost;
    if (price <= 0.0) continue;
    double have = payer.stock(g);
    if (have <= 1e-9) continue;
    double need_qty = due / price;
    double qty = std::min(have, need_qty);
    payer.take_stock(g, qty);
    government.add_stock(g, qty, catalog.at(g).durable);
    double value = qty * price;
    due -= value;
    taken_value += value;
  }
  if (due < 0.0) due = 0.0;
  return taken_value;
}

void fiat_accrue_and_collect_interest(FiatState& st, Ledger& ledger, Tick t) {
  for (LoanRecord& loan : st.loans) {
    if (loan.principal <= 0) continue;
    loan.accrued_interest += st.params.policy_rate * static_cast<double>(loan.principal);
    Count whole = static_cast<Count>(std::floor(loan.accrued_interest + 1e-9));
    if (whole <= 0) continue;
    Count note = ledger.balance(loan.borrower, st.note_class);
    Count credit = ledger.balance(loan.borrower, st.credit_class);
    Count pay = std::min(whole, note + credit);
    if (pay <= 0) continue;
    Count from_note = std::min(pay, note);
    if (from_note > 0) ledger.transfer(loan.borrower, loan.bank, st.note_class, from_note, t);
    if (pay - from_note > 0)
      ledger.transfer(loan.borrower, loan.bank, st.credit_class, pay - from_note, t);
    loan.accrued_interest -= static_cast<double>(pay);
    if (static_cast<std::size_t>(loan.borrower) < st.debt_by_agent.size()) {
      double& d = st.debt_by_agent[static_cast<std::size_t>(loan.borrower)];
      d = std::max(0.0, d - static_cast<double>(pay));
    }
  }
}

Project& PsiState::project(SpecId spec) {
  if (spec < 0 || static_cast<std::size_t>(spec) >= registry.size())
    fail(Err::NotRequested, "spec " + std::to_string(spec));
  return registry[static_cast<std::size_t>(spec)];
}

const Project& PsiState::project(SpecId spec) const {
  if (spec < 0 || static_cast<std::size_t>(spec) >= registry.size())
    fail(Err::NotRequested, "spec " + std::to_string(spec));
  return registry[static_cast<std::size_t>(spec)];
}

SpecId psi_request_project(PsiState& st, const std::string& spec, Count agreed_value,
                           int yes_votes, int electorate, Tick t) {
  if (spec.empty()) fail(Err::InvalidConfig, "empty project spec");
  if (agreed_value <= 0) fail(Err::ZeroAmount, "project value " + std::to_string(agreed_value));
  if (st.spec_index.count(spec)) fail(Err::DuplicateSpec, spec);
  if (electorate <= 0) fail(Err::InvalidConfig, "electorate must be positive");
  double needed = st.params.vote_threshold * static_cast<double>(electorate);
  if (static_cast<double>(yes_votes) < needed)
    fail(Err::VoteFailed, spec + ": " + std::to_string(yes_votes) + " of " +
                              std::to_string(electorate) + " below threshold");
  Project p;
  p.id = static_cast<SpecId>(st.registry.size());
  p.spec = spec;
  p.agreed_value = agreed_value;
  p.yes_votes = yes_votes;
  p.electorate = electorate;
  p.state = ProjectState::Requested;
  p.provider = st.provider;
  p.requested_tick = t;
  st.registry.push_back(std::move(p));
  st.spec_index[spec] = st.registry.back().id;
  st.delivered.push_back(0);
  return st.registry.back().id;
}

ClassId psi_deliver_project(PsiState& st, Ledger& ledger, AgentId provider, SpecId spec, Tick t) {
  Project& p = st.project(spec);
  if (p.state == ProjectState::Delivered) fail(Err::AlreadyDelivered, p.spec);
  p.state = ProjectState::Delivered;
  p.delivered_tick = t;
  p.provider = provider;
  p.issue_allowance = p.agreed_value;
  st.delivered[static_cast<std::size_t>(spec)] = 1;
  InstrumentClass cls;
  cls.kind = InstrumentKind::Psi;
  cls.issuer = provider;
  cls.collector = st.collector();
  cls.backing = p.spec;
  cls.spec = spec;
  p.cls = ledger.issue(cls, provider, p.agreed_value, t);
  return p.cls;
}

void psi_pay_government_service(PsiState& st, Ledger& ledger, AgentId agent, ClassId cls,
                                Count amount, Tick t) {
  if (agent < 0 || static_cast<std::size_t>(agent) >= st.demand_flag.size())
    fail(Err::UnknownAgent, "agent " + std::to_string(agent));
  if (!st.demand_flag[static_cast<std::size_t>(agent)])
    fail(Err::NoServiceDemand, "agent " + std::to_string(agent) + " has no pending demand");
  const InstrumentClass& c = ledger.instrument(cls);
  if (c.kind != InstrumentKind::Psi)
    fail(Err::MediumRejected, "service fees are paid in psi units");
  ledger.redeem_destroy(agent, cls, amount, c.collector, t);
  st.demand_flag[static_cast<std::size_t>(agent)] = 0;
}

void install_psi_gate(Ledger& ledger, PsiState& st) {
  ledger.set_psi_gate([&st](const InstrumentClass& cls, Count amount) {
    if (cls.spec < 0 || static_cast<std::size_t>(cls.spec) >= st.registry.size()) return false;
    Project& p = st.registry[static_cast<std::size_t>(cls.spec)];
    if (p.state != ProjectState::Delivered) return false;
    if (amount > p.issue_allowance) return false;
    p.issue_allowance -= amount;
    return true;
  });
}

}  // namespace psim
