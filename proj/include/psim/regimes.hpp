#pragma once

#include <map>
#include <string>
#include <vector>

#include "psim/agents.hpp"
#include "psim/goods.hpp"
#include "psim/instruments.hpp"
#include "psim/types.hpp"

namespace psim {

struct FiatParams {
  double policy_rate = 0.0005;      // interest per tick on bank credit
  double reserve_ratio_max = 10.0;  // outstanding fiat <= reserves x this, >= 1
  double tax_rate = 0.05;           // fraction of trade value, in [0, 1)
  bool legal_tender = true;
  std::vector<AgentId> access_order;  // front receives new currency first
};

struct LoanRecord {
  AgentId bank = kNoAgent;
  AgentId borrower = kNoAgent;
  Count principal = 0;
  double accrued_interest = 0.0;
  Tick opened = 0;
};

struct FiatState {
  FiatParams params;
  Count reserves = 0;
  AgentId central_bank = kNoAgent;
  AgentId bank = kNoAgent;
  AgentId government = kNoAgent;
  ClassId note_class = kNoClass;
  ClassId credit_class = kNoClass;
  std::vector<LoanRecord> loans;
  std::vector<double> tax_accrual;   // per agent, fractional until collected
  std::vector<double> debt_by_agent; // principal + accrued, kept current

  Count fiat_outstanding(const Ledger& ledger) const;
};

// issues fresh credit against the reserve ceiling:
// outstanding fiat + amount <= reserves x reserve_ratio_max
LoanRecord& fiat_expand_credit(FiatState& st, Ledger& ledger, AgentId bank,
                               AgentId borrower, Count amount, Tick t);

// accrues tax_rate x trade value against the payer and collects whole fiat
// units as the balance allows; returns units moved to the government
Count fiat_collect_taxes(FiatState& st, Ledger& ledger, AgentId payer,
                         double trade_value_fiat, Tick t);

// in-kind fallback when fiat is short: seizes goods at posted fiat prices
// until the accrual is covered or the inventory runs out; returns value taken
double fiat_tax_goods_fallback(FiatState& st, Agent& payer, Agent& government,
                               const GoodsCatalog& catalog,
                               const std::vector<double>& posted_fiat_price);

// per-tick interest: accrue on every loan, then collect whole units from the
// borrower's fiat balance toward the bank
void fiat_accrue_and_collect_interest(FiatState& st, Ledger& ledger, Tick t);

enum class ProjectState { Requested, Delivered };

struct Project {
  SpecId id = kNoSpec;
  std::string spec;        // service descriptor, unique
  Count agreed_value = 0;  // PSI value units issued at delivery, never exceeded
  int yes_votes = 0;
  int electorate = 0;
  ProjectState state = ProjectState::Requested;
  ClassId cls = kNoClass;  // PSI class, set at delivery
  AgentId provider = kNoAgent;
  Tick requested_tick = 0;
  Tick delivered_tick = -1;
  Count issue_allowance = 0;  // drained by the issue gate after delivery
  double funded_value = 0.0;  // input value the provider has bought so far
};

struct PsiParams {
  double vote_threshold = 0.5;      // yes votes >= threshold x electorate
  double service_demand_rate = 0.0; // per agent per tick
  Count service_fee = 1;
  bool provider_collects = true;    // else the government is the delegate
};

struct PsiState {
  PsiParams params;
  AgentId provider = kNoAgent;
  AgentId government = kNoAgent;
  std::vector<Project> registry;
  std::map<std::string, SpecId> spec_index;
  std::vector<std::uint8_t> delivered;    // dense by SpecId, feeds RegimeContext
  std::vector<std::uint8_t> demand_flag;  // per agent: service demanded this tick

  AgentId collector() const { return params.provider_collects ? provider : government; }
  Project& project(SpecId spec);
  const Project& project(SpecId spec) const;
};

// registers a voted project; the tally must clear the threshold
SpecId psi_request_project(PsiState& st, const std::string& spec, Count agreed_value,
                           int yes_votes, int electorate, Tick t);

// marks the project Delivered and issues its full agreed value to the
// provider through the gated ledger; returns the PSI class id
ClassId psi_deliver_project(PsiState& st, Ledger& ledger, AgentId provider, SpecId spec, Tick t);

// an agent with a pending service demand pays the collector; the presented
// units are destroyed, never re-spent
void psi_pay_government_service(PsiState& st, Ledger& ledger, AgentId agent,
                                ClassId cls, Count amount, Tick t);

// installs the issue gate: PSI issuance passes only for a Delivered spec with
// allowance left. Without a gate the ledger refuses all PSI issuance.
void install_psi_gate(Ledger& ledger, PsiState& st);

}  // namespace psim
