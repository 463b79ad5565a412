#include "psim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace psim {

namespace {

// how dear it feels to part with a unit, by kind: contractual claims on
// others go first, own debt and hoardable money are held back
double kind_spend_factor(InstrumentKind k) {
  switch (k) {
    case InstrumentKind::Psi:
    case InstrumentKind::Invoice: return 0.9;
    case InstrumentKind::FiatNote:
    case InstrumentKind::FiatCredit: return 0.95;
    case InstrumentKind::Iou: return 1.05;
    case InstrumentKind::CommodityMoney: return 1.1;
  }
  return 1.0;
}

constexpr double kMinTradeQty = 1e-6;
constexpr double kBarterMargin = 1.05;
constexpr double kRatioClampLo = 0.25;
constexpr double kRatioClampHi = 4.0;

}  // namespace

double propensity_from_ratio(double base, double slope, double ratio) {
  double p = base * (1.0 + slope * (ratio - 1.0));
  return std::clamp(p, 0.001, 0.999);
}

World::World(const ScenarioConfig& cfg)
    : cfg_(cfg), cred_(0), market_(0, cfg.marketability_rate, cfg.marketability_baseline,
                                    cfg.marketability_initial),
      rng_(cfg.seed) {
  keep_detail_ = cfg_.agents <= 256 && cfg_.horizon <= 5000;
  build_goods();
  build_agents();
  build_instruments();
  seed_metrics_frame();
}

void World::build_goods() {
  std::vector<double> values;
  for (const GoodSpec& g : cfg_.goods) {
    catalog_.add(Good{g.name, g.durable, g.cost, g.utility});
    values.push_back(g.utility);
  }
  obj_ = ObjectiveValues(std::move(values));
  market_ = MarketabilityTable(catalog_.size(), cfg_.marketability_rate,
                               cfg_.marketability_baseline, cfg_.marketability_initial);
  std::size_t n = catalog_.size();
  posted_.assign(n, {});
  demand_.assign(n, {});
  supply_.assign(n, {});
  base_price_.assign(n, 0.0);
  basket_.assign(n, 0.0);
  produced_.assign(n, 0.0);
  consumed_qty_.assign(n, 0.0);
  expired_.assign(n, 0.0);
  traded_this_tick_.assign(n, 0);
  refused_this_tick_.assign(n, 0);
  for (std::size_t g = 0; g < n; ++g) {
    double c = catalog_.at(static_cast<GoodId>(g)).cost;
    posted_[g] = {c, c, c, c};
    base_price_[g] = c;
  }
}

void World::build_agents() {
  int households = cfg_.agents;
  std::size_t goods = catalog_.size();
  for (int i = 0; i < households; ++i) {
    Agent a;
    a.id = static_cast<AgentId>(agents_.size());
    a.role = i < cfg_.firms ? Role::Firm : Role::Household;
    a.specialty = goods == 0 ? kNoGood : static_cast<GoodId>(i % goods);
    a.time_preference = cfg_.time_preference;
    a.accept_threshold = cfg_.acceptance_threshold;
    agents_.push_back(std::move(a));
  }
  if (cfg_.regime == RegimeKind::Psi) {
    Agent p;
    p.id = static_cast<AgentId>(agents_.size());
    p.role = Role::PublicProvider;
    p.time_preference = cfg_.time_preference;
    p.accept_threshold = cfg_.acceptance_threshold;
    agents_.push_back(std::move(p));
    if (!cfg_.psi.provider_collects) {
      Agent g;
      g.id = static_cast<AgentId>(agents_.size());
      g.role = Role::Government;
      g.time_preference = cfg_.time_preference;
      g.accept_threshold = cfg_.acceptance_threshold;
      agents_.push_back(std::move(g));
    }
  } else if (cfg_.regime == RegimeKind::Fiat) {
    for (Role r : {Role::Bank, Role::CentralBank, Role::Government}) {
      Agent a;
      a.id = static_cast<AgentId>(agents_.size());
      a.role = r;
      a.time_preference = cfg_.time_preference;
      a.accept_threshold = cfg_.acceptance_threshold;
      agents_.push_back(std::move(a));
    }
  }
  // valuation noise: one lognormal factor per agent per good plus one for
  // public projects, mean 1; sigma 0 draws nothing so short traces stay hand-checkable
  for (Agent& a : agents_) {
    a.noise.assign(goods, 1.0);
    if (cfg_.noise_sigma > 0.0) {
      double s = cfg_.noise_sigma;
      for (std::size_t g = 0; g < goods; ++g)
        a.noise[g] = std::exp(s * rng_.normal() - 0.5 * s * s);
      a.public_noise = std::exp(s * rng_.normal() - 0.5 * s * s);
    }
  }
  for (Agent& a : agents_) {
    if (a.specialty == kNoGood || cfg_.endowment_qty <= 0.0) continue;
    const Good& g = catalog_.at(a.specialty);
    a.add_stock(a.specialty, cfg_.endowment_qty, g.durable);
    // endowments are tick-0 production so the flow identity
    // produced == consumed + expired + inventory holds from the start
    produced_[static_cast<std::size_t>(a.specialty)] += cfg_.endowment_qty;
  }
  cred_ = CredibilityBook(agents_.size());
  eaten_value_by_agent_.assign(agents_.size(), 0.0);
}

void World::build_instruments() {
  ledger_ = std::make_unique<Ledger>(agents_.size(), catalog_.size());
  contracts_.retain_completed(keep_detail_);
  ledger_->set_event_sink([this](const LedgerEvent& ev) {
    if (ev.kind == EventKind::Transfer) {
      const InstrumentClass& c = ledger_->instrument(ev.cls);
      tick_transfer_value_[static_cast<int>(group_of(c.kind))] +=
          static_cast<double>(ev.amount * c.denomination);
    }
    if (external_sink_) external_sink_(ev);
  });
  iou_class_.assign(agents_.size(), kNoClass);

  if (!cfg_.commodity.good.empty() && !agents_.empty()) {
    GoodId g = catalog_.find(cfg_.commodity.good);
    InstrumentClass cls;
    cls.kind = InstrumentKind::CommodityMoney;
    cls.backing = cfg_.commodity.good;
    cls.backing_good = g;
    commodity_class_ = ledger_->register_class(cls);
    if (cfg_.commodity.endowment_units > 0) {
      for (int i = 0; i < cfg_.agents; ++i)
        ledger_->issue(commodity_class_, static_cast<AgentId>(i), cfg_.commodity.endowment_units,
                       0);
    }
  }

  if (cfg_.regime == RegimeKind::Psi) {
    PsiState st;
    st.params.vote_threshold = cfg_.psi.vote_threshold;
    st.params.service_demand_rate = cfg_.psi.service_demand_rate;
    st.params.service_fee = cfg_.psi.service_fee;
    st.params.provider_collects = cfg_.psi.provider_collects;
    for (const Agent& a : agents_) {
      if (a.role == Role::PublicProvider) st.provider = a.id;
      if (a.role == Role::Government) st.government = a.id;
    }
    st.demand_flag.assign(agents_.size(), 0);
    psi_ = std::move(st);
    install_psi_gate(*ledger_, *psi_);
  } else if (cfg_.regime == RegimeKind::Fiat) {
    FiatState st;
    st.params.policy_rate = cfg_.fiat.policy_rate;
    st.params.reserve_ratio_max = cfg_.fiat.reserve_ratio_max;
    st.params.tax_rate = cfg_.fiat.tax_rate;
    st.params.legal_tender = cfg_.fiat.legal_tender;
    for (const Agent& a : agents_) {
      if (a.role == Role::Bank) st.bank = a.id;
      if (a.role == Role::CentralBank) st.central_bank = a.id;
      if (a.role == Role::Government) st.government = a.id;
    }
    for (int i = 0; i < cfg_.agents; ++i) st.params.access_order.push_back(static_cast<AgentId>(i));
    st.tax_accrual.assign(agents_.size(), 0.0);
    st.debt_by_agent.assign(agents_.size(), 0.0);
    InstrumentClass note;
    note.kind = InstrumentKind::FiatNote;
    note.issuer = st.central_bank;
    note.backing = "legal tender";
    st.note_class = ledger_->register_class(note);
    InstrumentClass credit;
    credit.kind = InstrumentKind::FiatCredit;
    credit.issuer = st.bank;
    credit.backing = "bank credit";
    st.credit_class = ledger_->register_class(credit);
    Count issue_total = static_cast<Count>(cfg_.agents) * cfg_.fiat.initial_endowment;
    st.reserves = cfg_.fiat.reserves > 0
                      ? cfg_.fiat.reserves
                      : std::max<Count>(1, (issue_total + 1) / 2);
    fiat_ = std::move(st);
    if (cfg_.fiat.initial_endowment > 0) {
      for (int i = 0; i < cfg_.agents; ++i)
        ledger_->issue(fiat_->note_class, static_cast<AgentId>(i), cfg_.fiat.initial_endowment, 0);
    }
  }

  // index basket: what society produces in a tick
  for (const Agent& a : agents_) {
    if (a.specialty == kNoGood) continue;
    double q = cfg_.production_qty * (a.role == Role::Firm ? 2.0 : 1.0);
    basket_[static_cast<std::size_t>(a.specialty)] += q;
  }

  // endowment issues stay retained so the event log always opens with them;
  // only the per-tick flow is dropped on large runs
  ledger_->retain_events(keep_detail_);
}

RegimeContext World::regime_context() const {
  RegimeContext ctx;
  ctx.regime = cfg_.regime;
  ctx.credibility = &cred_;
  ctx.marketability = &market_;
  if (fiat_) {
    ctx.legal_tender = fiat_->params.legal_tender;
    ctx.tax_rate = fiat_->params.tax_rate;
  }
  if (psi_) ctx.spec_delivered = &psi_->delivered;
  return ctx;
}

void World::set_external_event_sink(std::function<void(const LedgerEvent&)> sink) {
  external_sink_ = std::move(sink);
}

double World::posted_price(GoodId g, Group grp) const {
  if (!catalog_.valid(g)) fail(Err::UnknownGood, "good id " + std::to_string(g));
  return posted_[static_cast<std::size_t>(g)][static_cast<int>(grp)];
}

double World::unit_value(ClassId cls) const {
  const InstrumentClass& c = ledger_->instrument(cls);
  double idx = index_[static_cast<int>(group_of(c.kind))];
  if (idx <= 0.0) idx = 1.0;
  return static_cast<double>(c.denomination) / idx;
}

double World::spend_factor(InstrumentKind k) const { return kind_spend_factor(k); }

// cash-balance pressure: parting with a unit feels cheap when holdings run
// above the target real balance and dear when they run below it
double World::cash_factor(AgentId a, Group grp) const {
  if (cfg_.cash_target <= 0.0) return 1.0;
  double idx = index_[static_cast<int>(grp)];
  if (idx <= 0.0) idx = 1.0;
  double real = ledger_->balance_value(a, grp) / idx;
  double f = cfg_.cash_target / std::max(real, 0.25 * cfg_.cash_target);
  return std::clamp(f, 0.5, 2.0);
}

double World::subj(AgentId a, GoodId g, double qty) const {
  const Agent& ag = agents_[static_cast<std::size_t>(a)];
  double factor = static_cast<std::size_t>(g) < ag.noise.size()
                      ? ag.noise[static_cast<std::size_t>(g)]
                      : 1.0;
  return qty * obj_.at(g, tick_) * factor;
}

Count World::own_iou_outstanding_value(AgentId a) const {
  return static_cast<Count>(
      std::llround(ledger_->issued_liability_value(a, InstrumentKind::Iou)));
}

Count World::iou_cap(AgentId a) const {
  Count cap = cfg_.iou.issue_cap;
  if (psi_ && a == psi_->provider) {
    for (const Project& p : psi_->registry) {
      if (p.state != ProjectState::Requested) continue;
      double need = cfg_.psi.input_cost_fraction * static_cast<double>(p.agreed_value);
      double open = need - p.funded_value;
      if (open > 0.0) cap += static_cast<Count>(std::ceil(open)) + 1;
    }
  }
  return cap;
}

ClassId World::iou_class_of(AgentId issuer) {
  ClassId& slot = iou_class_[static_cast<std::size_t>(issuer)];
  if (slot != kNoClass) return slot;
  const Agent& a = agents_[static_cast<std::size_t>(issuer)];
  InstrumentClass cls;
  cls.kind = InstrumentKind::Iou;
  cls.issuer = issuer;
  cls.backing_good = a.specialty;
  cls.backing = a.specialty != kNoGood ? catalog_.at(a.specialty).name : std::string("services");
  slot = ledger_->register_class(cls);
  return slot;
}

void World::step() {
  ++tick_;
  for (auto& d : demand_) d = {};
  for (auto& s : supply_) s = {};
  tick_transfer_value_ = {};
  tick_consumption_value_ = 0.0;
  std::fill(traded_this_tick_.begin(), traded_this_tick_.end(), 0);
  std::fill(refused_this_tick_.begin(), refused_this_tick_.end(), 0);

  phase_production();
  phase_regime_events();
  phase_meetings();
  if (fiat_) fiscal_recycle();
  phase_consumption();
  phase_prices();
  phase_marketability();
  phase_metrics();
}

void World::phase_production() {
  if (cfg_.production_qty <= 0.0) return;
  for (Agent& a : agents_) {
    if (a.specialty == kNoGood) continue;
    double qty = cfg_.production_qty * (a.role == Role::Firm ? 2.0 : 1.0);
    const Good& g = catalog_.at(a.specialty);
    a.add_stock(a.specialty, qty, g.durable);
    produced_[static_cast<std::size_t>(a.specialty)] += qty;
  }
}

void World::reshuffle_specialties() {
  std::size_t goods = catalog_.size();
  if (goods < 2) return;
  for (int i = 0; i < cfg_.agents; ++i) {
    Agent& a = agents_[static_cast<std::size_t>(i)];
    if (a.specialty == kNoGood) continue;
    a.specialty = static_cast<GoodId>((static_cast<std::size_t>(a.specialty) + 1) % goods);
  }
  std::fill(basket_.begin(), basket_.end(), 0.0);
  for (const Agent& a : agents_) {
    if (a.specialty == kNoGood) continue;
    basket_[static_cast<std::size_t>(a.specialty)] +=
        cfg_.production_qty * (a.role == Role::Firm ? 2.0 : 1.0);
  }
}

void World::phase_regime_events() {
  if (tick_ == cfg_.reshuffle_tick) reshuffle_specialties();
  if (psi_) {
    psi_project_cadence();
    psi_fund_and_deliver();
    psi_provider_buyback();
    psi_provider_spend_down();
    psi_service_sink();
  }
  if (fiat_) {
    fiat_interest();
    cantillon_snapshot_if_due();
    fiat_expansion_events();
  }
}

void World::psi_project_cadence() {
  const PsiConfig& pc = cfg_.psi;
  if (pc.project_value <= 0) return;
  bool due = pc.project_interval > 0
                 ? tick_ >= pc.first_project_tick &&
                       (tick_ - pc.first_project_tick) % pc.project_interval == 0
                 : tick_ == pc.first_project_tick;
  if (!due) return;
  int yes = 0;
  for (const Agent& a : agents_)
    if (pc.benefit_factor * a.public_noise >= 1.0) ++yes;
  std::string spec = "project-" + std::to_string(project_counter_++);
  try {
    psi_request_project(*psi_, spec, pc.project_value, yes, static_cast<int>(agents_.size()),
                        tick_);
  } catch (const SimError& e) {
    if (e.code() != Err::VoteFailed) throw;  // society said no; nothing issued
  }
}

void World::psi_fund_and_deliver() {
  RegimeContext ctx = regime_context();
  for (Project& p : psi_->registry) {
    if (p.state != ProjectState::Requested) continue;
    double need = cfg_.psi.input_cost_fraction * static_cast<double>(p.agreed_value);
    Agent& provider = agents_[static_cast<std::size_t>(psi_->provider)];
    if (p.funded_value + 1e-9 < need) {
      // buy inputs from households against fresh provider IOUs; shuffled so
      // project income does not pool with the same suppliers every round
      ClassId iou = iou_class_of(psi_->provider);
      std::vector<AgentId> suppliers;
      for (const Agent& a : agents_)
        if (a.id != provider.id && a.specialty != kNoGood) suppliers.push_back(a.id);
      rng_.shuffle(suppliers);
      for (AgentId sid : suppliers) {
        Agent& seller = agents_[static_cast<std::size_t>(sid)];
        if (p.funded_value + 1e-9 >= need) break;
        double stock = seller.stock(seller.specialty);
        if (stock < 0.5) continue;
        const InstrumentClass& cls = ledger_->instrument(iou);
        if (!accept_decision(seller, cls, ctx).accepted) continue;
        double price = posted_[static_cast<std::size_t>(seller.specialty)]
                               [static_cast<int>(Group::Iou)];
        Count units = 0;
        double qty = 0.0;
        if (!size_monetary_trade(price, stock, 1, units, qty)) continue;
        MediumChoice choice;
        choice.medium = Medium::Iou;
        choice.cls = iou;
        choice.units = units;
        choice.issue_new = true;
        settle_first_half(contracts_, *ledger_, catalog_, seller, provider, seller.specialty,
                          qty, choice, ctx, tick_);
        traded_this_tick_[static_cast<std::size_t>(seller.specialty)] = 1;
        // procurement at the posted price is not a market signal either way
        record_demand_supply(seller.specialty, Group::Iou, qty, qty);
        p.funded_value += qty * catalog_.at(seller.specialty).cost;
      }
    }
    if (p.funded_value + 1e-9 >= need) {
      // inputs are consumed by the delivery itself
      double to_consume = need;
      for (GoodId g = 0; static_cast<std::size_t>(g) < catalog_.size() && to_consume > 1e-9;
           ++g) {
        double have = provider.stock(g);
        if (have <= 1e-9) continue;
        double unit_cost = catalog_.at(g).cost;
        double qty = std::min(have, to_consume / unit_cost);
        provider.take_stock(g, qty);
        // project inputs leave the goods stock; they count as consumed
        // quantity but not as household consumption value
        consumed_qty_[static_cast<std::size_t>(g)] += qty;
        to_consume -= qty * unit_cost;
      }
      psi_deliver_project(*psi_, *ledger_, psi_->provider, p.id, tick_);
    }
  }
}

void World::psi_provider_buyback() {
  // the provider retires its own funding IOUs first, swapping PSIs at par
  AgentId prov = psi_->provider;
  ClassId iou = iou_class_[static_cast<std::size_t>(prov)];
  if (iou == kNoClass) return;
  for (Agent& holder : agents_) {
    if (holder.id == prov) continue;
    Count held = ledger_->balance(holder.id, iou);
    if (held <= 0) continue;
    // wallet entries vanish when drained, so fix the class list up front
    std::vector<ClassId> psi_classes;
    for (const auto& [cls, bal] : ledger_->wallet(prov)) {
      (void)bal;
      if (ledger_->instrument(cls).kind == InstrumentKind::Psi) psi_classes.push_back(cls);
    }
    for (ClassId cls : psi_classes) {
      if (held <= 0) break;
      Count swap = std::min(held, ledger_->balance(prov, cls));
      if (swap <= 0) continue;
      ledger_->transfer(prov, holder.id, cls, swap, tick_);
      ledger_->redeem_destroy(holder.id, iou, swap, prov, tick_);
      contracts_.attribute_destroyed(iou, swap, tick_);
      cred_.record_honored(prov);
      held -= swap;
    }
  }
}

// whatever the buyback left with the provider is its own earnings; spending
// them at once keeps project surplus from pooling outside circulation
void World::psi_provider_spend_down() {
  AgentId prov = psi_->provider;
  std::vector<ClassId> psi_classes;
  for (const auto& [cls, bal] : ledger_->wallet(prov)) {
    (void)bal;
    if (ledger_->instrument(cls).kind == InstrumentKind::Psi) psi_classes.push_back(cls);
  }
  for (ClassId cls : psi_classes) institutional_spend(prov, cls, Group::Psi);
}

void World::psi_service_sink() {
  if (psi_->params.service_demand_rate <= 0.0) return;
  for (Agent& a : agents_) {
    if (a.id == psi_->provider || a.id == psi_->government) continue;
    if (rng_.uniform01() >= psi_->params.service_demand_rate) continue;
    psi_->demand_flag[static_cast<std::size_t>(a.id)] = 1;
    // pay from the largest psi holding, partial if short
    ClassId best = kNoClass;
    Count best_bal = 0;
    for (const auto& [cls, bal] : ledger_->wallet(a.id)) {
      if (ledger_->instrument(cls).kind != InstrumentKind::Psi) continue;
      if (bal > best_bal) {
        best = cls;
        best_bal = bal;
      }
    }
    if (best != kNoClass) {
      Count fee = std::min<Count>(psi_->params.service_fee, best_bal);
      psi_pay_government_service(*psi_, *ledger_, a.id, best, fee, tick_);
    } else {
      psi_->demand_flag[static_cast<std::size_t>(a.id)] = 0;  // service missed
    }
  }
}

void World::fiat_interest() { fiat_accrue_and_collect_interest(*fiat_, *ledger_, tick_); }

// an institution spends a whole class balance back on goods in one tick,
// buying from producers in shuffled order at posted prices
void World::institutional_spend(AgentId spender_id, ClassId cls, Group grp) {
  Count budget = ledger_->balance(spender_id, cls);
  if (budget <= 0) return;
  RegimeContext ctx = regime_context();
  Agent& spender = agents_[static_cast<std::size_t>(spender_id)];
  std::vector<AgentId> sellers;
  for (const Agent& a : agents_)
    if ((a.role == Role::Household || a.role == Role::Firm) && a.specialty != kNoGood)
      sellers.push_back(a.id);
  if (sellers.empty()) return;
  const InstrumentClass& c = ledger_->instrument(cls);
  rng_.shuffle(sellers);
  for (AgentId sid : sellers) {
    if (budget <= 0) break;
    Agent& seller = agents_[static_cast<std::size_t>(sid)];
    double stock = seller.stock(seller.specialty);
    double price =
        posted_[static_cast<std::size_t>(seller.specialty)][static_cast<int>(grp)];
    Count units = 0;
    double qty = 0.0;
    if (!size_monetary_trade(price, stock, c.denomination, units, qty)) continue;
    if (units > budget) {
      units = budget;
      qty = static_cast<double>(units * c.denomination) / price;
    }
    if (!accept_decision(seller, c, ctx).accepted) continue;
    MediumChoice choice;
    choice.medium = Medium::Money;
    choice.cls = cls;
    choice.units = units;
    choice.issue_new = false;
    settle_first_half(contracts_, *ledger_, catalog_, seller, spender, seller.specialty,
                      qty, choice, ctx, tick_);
    traded_this_tick_[static_cast<std::size_t>(seller.specialty)] = 1;
    // procurement at the posted price is not a market signal either way
    record_demand_supply(seller.specialty, grp, qty, qty);
    budget -= units;
  }
}

// taxes and interest would otherwise pool at the government and the bank and
// strangle circulation; the government spends its takings back on goods every
// tick, and the bank either does the same or pays its income out as dividends
// to its owner households
void World::fiscal_recycle() {
  if (fiat_->government != kNoAgent)
    for (ClassId cls : {fiat_->note_class, fiat_->credit_class})
      if (cls != kNoClass) institutional_spend(fiat_->government, cls, Group::Fiat);
  if (fiat_->bank == kNoAgent) return;
  int owners = std::min(cfg_.fiat.bank_owners, cfg_.agents);
  if (owners <= 0) {
    for (ClassId cls : {fiat_->note_class, fiat_->credit_class})
      if (cls != kNoClass) institutional_spend(fiat_->bank, cls, Group::Fiat);
    return;
  }
  for (ClassId cls : {fiat_->note_class, fiat_->credit_class}) {
    if (cls == kNoClass) continue;
    Count bal = ledger_->balance(fiat_->bank, cls);
    if (bal < owners) continue;  // keep crumbs until a whole share per owner accrues
    Count share = bal / owners;
    for (int i = 0; i < owners; ++i)
      ledger_->transfer(fiat_->bank, static_cast<AgentId>(i), cls, share, tick_);
  }
}

void World::fiat_expansion_events() {
  const FiatConfig& fc = cfg_.fiat;
  auto distribute = [&](Count amount) {
    int passes = 0;
    while (amount > 0 && passes < 100) {
      Count before = amount;
      for (AgentId borrower : fiat_->params.access_order) {
        if (amount <= 0) break;
        Count take = std::min<Count>(fc.loan_unit, amount);
        try {
          fiat_expand_credit(*fiat_, *ledger_, fiat_->bank, borrower, take, tick_);
        } catch (const SimError& e) {
          if (e.code() == Err::ReserveLimitExceeded) return;  // ceiling hit, stop expanding
          throw;
        }
        amount -= take;
      }
      if (amount == before) break;  // empty access order
      ++passes;
    }
  };
  bool periodic_due = fc.expansion_interval > 0 && fc.expansion_fraction > 0.0 &&
                      tick_ >= fc.expansion_start &&
                      (tick_ - fc.expansion_start) % fc.expansion_interval == 0;
  if (periodic_due) {
    Count x = static_cast<Count>(
        std::llround(fc.expansion_fraction * static_cast<double>(fiat_->fiat_outstanding(*ledger_))));
    if (x > 0) distribute(x);
  }
  if (tick_ == fc.shock_tick && fc.shock_fraction > 0.0) {
    Count x = static_cast<Count>(
        std::llround(fc.shock_fraction * static_cast<double>(fiat_->fiat_outstanding(*ledger_))));
    if (x > 0) distribute(x);
  }
}

double World::basket_cost_fiat() const {
  double total_weight = 0.0, cost = 0.0;
  for (std::size_t g = 0; g < basket_.size(); ++g) {
    total_weight += basket_[g];
    cost += basket_[g] * posted_[g][static_cast<int>(Group::Fiat)];
  }
  if (total_weight <= 0.0 || cost <= 0.0) return 1.0;
  return cost / total_weight;
}

double World::real_position_in_goods(AgentId a, double basket_cost) const {
  const Agent& ag = agents_[static_cast<std::size_t>(a)];
  double w = eaten_value_by_agent_[static_cast<std::size_t>(a)];
  for (const auto& [g, qty] : ag.durables) w += qty * obj_.at(g, tick_);
  for (const auto& [g, qty] : ag.fresh) w += qty * obj_.at(g, tick_);
  double fiat_units = ledger_->balance_value(a, Group::Fiat);
  double debt = fiat_ ? fiat_->debt_by_agent[static_cast<std::size_t>(a)] : 0.0;
  return w + (fiat_units - debt) / basket_cost;
}

void World::cantillon_snapshot_if_due() {
  if (!cantillon_frozen_.empty()) return;
  const FiatConfig& fc = cfg_.fiat;
  if (cantillon_base_.empty()) {
    Tick target = fc.cantillon_tick;
    if (target < 0) {
      if (fc.expansion_interval > 0 && fc.expansion_fraction > 0.0) {
        // ticks run from 1, so the first firing is the first multiple of the
        // interval past max(start, 1)
        Tick t0 = std::max<Tick>(fc.expansion_start, 1);
        Tick rem = (t0 - fc.expansion_start) % fc.expansion_interval;
        target = rem == 0 ? t0 : t0 + (fc.expansion_interval - rem);
      }
      if (fc.shock_tick >= 0 && fc.shock_fraction > 0.0)
        target = target < 0 ? fc.shock_tick : std::min(target, fc.shock_tick);
    }
    if (target < 0 || tick_ != target) return;
    cantillon_tick_ = target;
    double basket = basket_cost_fiat();
    for (int i = 0; i < cfg_.agents; ++i)
      cantillon_base_.push_back(real_position_in_goods(static_cast<AgentId>(i), basket));
    cantillon_ranks_.assign(static_cast<std::size_t>(cfg_.agents), 0.0);
    for (std::size_t r = 0; r < fiat_->params.access_order.size(); ++r) {
      AgentId a = fiat_->params.access_order[r];
      if (a >= 0 && a < cfg_.agents)
        cantillon_ranks_[static_cast<std::size_t>(a)] = static_cast<double>(r);
    }
    return;
  }
  if (tick_ >= cantillon_tick_ + fc.cantillon_window) {
    double basket = basket_cost_fiat();
    for (int i = 0; i < cfg_.agents; ++i)
      cantillon_frozen_.push_back(real_position_in_goods(static_cast<AgentId>(i), basket) -
                                  cantillon_base_[static_cast<std::size_t>(i)]);
  }
}

std::vector<double> World::cantillon_deltas() const {
  if (!cantillon_frozen_.empty()) return cantillon_frozen_;
  std::vector<double> deltas;
  if (cantillon_base_.empty()) return deltas;
  double basket = basket_cost_fiat();
  for (int i = 0; i < cfg_.agents; ++i)
    deltas.push_back(real_position_in_goods(static_cast<AgentId>(i), basket) -
                     cantillon_base_[static_cast<std::size_t>(i)]);
  return deltas;
}

void World::phase_meetings() {
  std::vector<AgentId> pool;
  for (const Agent& a : agents_)
    if (a.role != Role::CentralBank) pool.push_back(a.id);
  if (pool.size() < 2) return;
  rng_.shuffle(pool);
  std::size_t meetings = pool.size() / 2;
  for (std::size_t k = 0; k < meetings; ++k) meet(pool[2 * k], pool[2 * k + 1]);
}

void World::meet(AgentId x, AgentId y) {
  try_redeem(x, y);
  try_redeem(y, x);
  try_trade(x, y);
  try_trade(y, x);
}

void World::try_redeem(AgentId bearer_id, AgentId counterpart_id) {
  Agent& bearer = agents_[static_cast<std::size_t>(bearer_id)];
  Agent& counterpart = agents_[static_cast<std::size_t>(counterpart_id)];
  std::vector<ClassId> claims;
  for (const auto& [cls, bal] : ledger_->wallet(bearer_id)) {
    (void)bal;
    const InstrumentClass& c = ledger_->instrument(cls);
    if (c.kind == InstrumentKind::Iou && c.issuer == counterpart_id) claims.push_back(cls);
    if (c.kind == InstrumentKind::Invoice && c.issuer == bearer_id &&
        c.obligor == counterpart_id)
      claims.push_back(cls);
  }
  for (ClassId cls : claims) {
    auto open = contracts_.open_ids(cls);
    if (open.empty()) continue;
    ExchangeContract& head = contracts_.at(open.front());
    const InstrumentClass& c = ledger_->instrument(cls);
    GoodId g = c.backing_good != kNoGood ? c.backing_good : head.delivered_good;
    if (g == kNoGood) continue;
    Count bal = ledger_->balance(bearer_id, cls);
    if (bal <= 0) continue;
    double price = posted_[static_cast<std::size_t>(g)][static_cast<int>(group_of(c.kind))];
    if (price <= 0.0) continue;
    Count units = std::min<Count>({bal, head.remaining,
                                   std::max<Count>(1, std::llround(price))});
    if (units <= 0) continue;
    double qty = static_cast<double>(units) / price;
    double interest = subj(bearer_id, g, qty);
    double cost = static_cast<double>(units) * unit_value(cls) * spend_factor(c.kind) *
                  bearer.time_preference * cash_factor(bearer_id, group_of(c.kind));
    if (interest <= cost) continue;
    double stock = counterpart.stock(g);
    if (stock + 1e-9 >= qty) {
      complete_exchange(contracts_, *ledger_, catalog_, head.id, bearer, counterpart, qty, units,
                        &cred_, tick_);
      traded_this_tick_[static_cast<std::size_t>(g)] = 1;
      record_demand_supply(g, group_of(c.kind), qty, 0.0);
    } else {
      // issuer cannot honor the claim in full
      Count partial = static_cast<Count>(std::floor(stock * price));
      partial = std::min<Count>({partial, bal, head.remaining});
      if (partial > 0) {
        double pqty = static_cast<double>(partial) / price;
        complete_exchange(contracts_, *ledger_, catalog_, head.id, bearer, counterpart, pqty,
                          partial, &cred_, tick_);
        traded_this_tick_[static_cast<std::size_t>(g)] = 1;
        record_demand_supply(g, group_of(c.kind), pqty, 0.0);
      }
      if (c.kind == InstrumentKind::Iou) cred_.record_defaulted(counterpart_id);
    }
  }
}

// picks the integral payment and the goods quantity it buys at the posted
// price: units / price goods change hands, so indivisible units never block
// low-price trades. Returns false when the seller's whole stock is worth
// less than one unit.
bool World::size_monetary_trade(double price, double stock, Count denom, Count& units,
                                double& qty) const {
  if (price <= 0.0 || stock < kMinTradeQty) return false;
  double want = std::min(1.0, stock);
  units = std::max<Count>(1, std::llround(price * want / static_cast<double>(denom)));
  qty = static_cast<double>(units * denom) / price;
  if (qty > stock) {
    units = static_cast<Count>(std::floor(price * stock / static_cast<double>(denom)));
    if (units < 1) return false;
    qty = static_cast<double>(units * denom) / price;
  }
  return true;
}

bool World::try_trade(AgentId seller_id, AgentId buyer_id) {
  Agent& seller = agents_[static_cast<std::size_t>(seller_id)];
  Agent& buyer = agents_[static_cast<std::size_t>(buyer_id)];
  GoodId g = seller.specialty;
  if (g == kNoGood) return false;
  double stock = seller.stock(g);
  if (stock < kMinTradeQty) return false;
  RegimeContext ctx = regime_context();
  bool tax_first = fiat_.has_value() && fiat_->params.legal_tender && fiat_->params.tax_rate > 0.0;

  struct Plan {
    int what = 0;  // 0 pay, 1 issue, 2 barter
    ClassId cls = kNoClass;
    Count units = 0;
    double qty = 0.0;
    GoodId counter = kNoGood;
    double counter_qty = 0.0;
    Group grp = Group::Iou;
    InstrumentKind kind = InstrumentKind::Iou;
  };
  std::vector<Plan> plans;
  std::vector<ActionCandidate> candidates;

  // (1) pay with circulating units the seller accepts, in spending order
  std::vector<ClassId> options;
  for (const auto& [cls, bal] : ledger_->wallet(buyer_id)) {
    (void)bal;
    if (accept_decision(seller, ledger_->instrument(cls), ctx).accepted) options.push_back(cls);
  }
  options = spending_order(buyer, std::move(options), *ledger_, cfg_.regime, tax_first);
  Group miss_grp = Group::Iou;
  bool offer_stood = false, affordable = false;
  for (ClassId cls : options) {
    const InstrumentClass& c = ledger_->instrument(cls);
    Group grp = group_of(c.kind);
    double price = posted_[static_cast<std::size_t>(g)][static_cast<int>(grp)];
    Count units = 0;
    double qty = 0.0;
    // stock too small to denominate is no signal; a standing offer is
    if (!size_monetary_trade(price, stock, c.denomination, units, qty)) continue;
    if (!offer_stood) {
      offer_stood = true;
      miss_grp = grp;
    }
    if (ledger_->balance(buyer_id, cls) < units) continue;
    Plan p;
    p.what = 0;
    p.cls = cls;
    p.units = units;
    p.qty = qty;
    p.grp = grp;
    p.kind = c.kind;
    plans.push_back(p);
    double cost = static_cast<double>(units) * unit_value(cls) * spend_factor(c.kind) *
                  buyer.time_preference * cash_factor(buyer_id, grp);
    candidates.push_back({static_cast<int>(plans.size()) - 1, subj(buyer_id, g, qty), cost});
    affordable = true;
    break;  // first affordable class in preference order speaks for currency
  }

  // (2) issue a fresh IOU when no held currency will do
  if (!affordable && cfg_.iou.enabled && cfg_.regime != RegimeKind::BarterOnly &&
      (buyer.role == Role::Household || buyer.role == Role::Firm ||
       buyer.role == Role::PublicProvider)) {
    double cred = cred_.credibility(buyer_id);
    if (cred >= seller.accept_threshold) {
      double price = posted_[static_cast<std::size_t>(g)][static_cast<int>(Group::Iou)];
      Count units = 0;
      double qty = 0.0;
      if (size_monetary_trade(price, stock, 1, units, qty) &&
          own_iou_outstanding_value(buyer_id) + units <= iou_cap(buyer_id)) {
        if (!offer_stood) {
          offer_stood = true;
          miss_grp = Group::Iou;
        }
        Plan p;
        p.what = 1;
        p.cls = kNoClass;  // resolved at execution to the buyer's own class
        p.units = units;
        p.qty = qty;
        p.grp = Group::Iou;
        p.kind = InstrumentKind::Iou;
        plans.push_back(p);
        double idx = index_[static_cast<int>(Group::Iou)];
        if (idx <= 0.0) idx = 1.0;
        double cost = static_cast<double>(units) / idx *
                      kind_spend_factor(InstrumentKind::Iou) * buyer.time_preference;
        candidates.push_back({static_cast<int>(plans.size()) - 1, subj(buyer_id, g, qty), cost});
      }
    }
  }

  // (3) barter fallback
  GoodId h = buyer.specialty;
  if (h != kNoGood && h != g && buyer.stock(h) >= 0.1) {
    double want = std::min(1.0, stock);
    double direct = subj(seller_id, h, 1.0);
    double medium = 0.0;
    if (market_.score(h) >= seller.accept_threshold) medium = catalog_.at(h).cost;
    else if (direct < 0.5 * catalog_.at(h).cost)
      refused_this_tick_[static_cast<std::size_t>(h)] = 1;  // offered, not wanted
    double seller_unit_val = std::max(direct, medium);
    if (seller_unit_val > 1e-12) {
      double give_value = subj(seller_id, g, want);
      double r = kBarterMargin * give_value / seller_unit_val;
      if (r > 1e-9 && r <= buyer.stock(h)) {
        Plan p;
        p.what = 2;
        p.qty = want;
        p.counter = h;
        p.counter_qty = r;
        plans.push_back(p);
        candidates.push_back({static_cast<int>(plans.size()) - 1, subj(buyer_id, g, want),
                              subj(buyer_id, h, r)});
      }
    }
  }

  auto choice = decide_action(candidates);
  if (!choice) {
    // an offer stood and found no taker: downward pressure on the posted
    // price in the group the buyer would have paid in
    if (offer_stood) record_demand_supply(g, miss_grp, 0.0, std::min(1.0, stock));
    return false;
  }
  const Plan& plan = plans[static_cast<std::size_t>(candidates[*choice].tag)];

  MediumChoice mc;
  switch (plan.what) {
    case 0: {
      mc.medium = plan.kind == InstrumentKind::Iou ? Medium::Iou
                  : plan.kind == InstrumentKind::Invoice || plan.kind == InstrumentKind::Psi
                      ? Medium::Invoice
                      : Medium::Money;
      mc.cls = plan.cls;
      mc.units = plan.units;
      break;
    }
    case 1: {
      mc.medium = Medium::Iou;
      mc.cls = iou_class_of(buyer_id);
      mc.units = plan.units;
      mc.issue_new = true;
      break;
    }
    default: {
      mc.medium = Medium::Barter;
      mc.counter_good = plan.counter;
      mc.counter_qty = plan.counter_qty;
      break;
    }
  }
  settle_first_half(contracts_, *ledger_, catalog_, seller, buyer, g, plan.qty, mc, ctx, tick_);
  traded_this_tick_[static_cast<std::size_t>(g)] = 1;
  if (plan.what == 2) {
    traded_this_tick_[static_cast<std::size_t>(plan.counter)] = 1;
  } else {
    // a sale at the posted price argues the price was not too high
    record_demand_supply(g, plan.grp, plan.qty, 0.0);
  }
  if (fiat_ && fiat_->params.tax_rate > 0.0) {
    double value =
        plan.qty * posted_[static_cast<std::size_t>(g)][static_cast<int>(Group::Fiat)];
    note_trade_tax(seller_id, value);
  }
  return true;
}

void World::note_trade_tax(AgentId seller, double value_units) {
  fiat_collect_taxes(*fiat_, *ledger_, seller, value_units, tick_);
  // collect in kind when the accrual cannot be met in currency
  double due = fiat_->tax_accrual[static_cast<std::size_t>(seller)];
  if (due >= 2.0) {
    std::vector<double> fiat_prices(catalog_.size());
    for (std::size_t g = 0; g < catalog_.size(); ++g)
      fiat_prices[g] = posted_[g][static_cast<int>(Group::Fiat)];
    fiat_tax_goods_fallback(*fiat_, agents_[static_cast<std::size_t>(seller)],
                            agents_[static_cast<std::size_t>(fiat_->government)], catalog_,
                            fiat_prices);
  }
}

void World::record_demand_supply(GoodId g, Group grp, double demand, double supply) {
  demand_[static_cast<std::size_t>(g)][static_cast<int>(grp)] += demand;
  supply_[static_cast<std::size_t>(g)][static_cast<int>(grp)] += supply;
}

void World::phase_consumption() {
  double ratio = 1.0;
  if (distortion_ref_ > 0.0) {
    double raw = 0.0;
    double real = real_savings();
    double perceived = 0.0;
    for (const Agent& a : agents_)
      if (a.role != Role::CentralBank) perceived += perceived_savings(a.id);
    raw = perceived / std::max(real, 1e-9);
    ratio = std::clamp(raw / distortion_ref_, kRatioClampLo, kRatioClampHi);
  }
  double p = propensity_from_ratio(cfg_.propensity_base, cfg_.propensity_slope, ratio);
  for (Agent& a : agents_) {
    double& eaten = eaten_value_by_agent_[static_cast<std::size_t>(a.id)];
    // perishables do not keep: everything fresh is eaten now
    for (auto it = a.fresh.begin(); it != a.fresh.end();) {
      double qty = it->second;
      double value = qty * obj_.at(it->first, tick_);
      tick_consumption_value_ += value;
      eaten += value;
      consumed_qty_[static_cast<std::size_t>(it->first)] += qty;
      it = a.fresh.erase(it);
    }
    for (auto it = a.durables.begin(); it != a.durables.end();) {
      double eat = p * it->second;
      if (it->second - eat <= 1e-9) eat = it->second;  // crumbs are eaten too
      double value = eat * obj_.at(it->first, tick_);
      tick_consumption_value_ += value;
      eaten += value;
      consumed_qty_[static_cast<std::size_t>(it->first)] += eat;
      it->second -= eat;
      if (it->second <= 0.0) it = a.durables.erase(it);
      else ++it;
    }
  }
}

void World::phase_prices() {
  for (std::size_t g = 0; g < posted_.size(); ++g) {
    for (int grp = 0; grp < kGroupCount; ++grp) {
      double d = demand_[g][grp], s = supply_[g][grp];
      if (d + s < 1e-12) continue;
      double edr = (d - s) / std::max(d + s, 1.0);
      posted_[g][grp] *= 1.0 + cfg_.price_eta * edr;
      if (posted_[g][grp] < cfg_.price_floor) posted_[g][grp] = cfg_.price_floor;
    }
  }
}

void World::phase_marketability() {
  for (std::size_t g = 0; g < traded_this_tick_.size(); ++g) {
    TradeOutcome out = traded_this_tick_[g] ? TradeOutcome::Accepted
                       : refused_this_tick_[g] ? TradeOutcome::Refused
                                               : TradeOutcome::Inactive;
    market_.apply(static_cast<GoodId>(g), out);
  }
}

double World::real_savings() const {
  double v = 0.0;
  for (const Agent& a : agents_) {
    for (const auto& [g, qty] : a.durables) v += qty * obj_.at(g, tick_);
    for (const auto& [g, qty] : a.fresh) v += qty * obj_.at(g, tick_);
  }
  return v;
}

double World::perceived_savings(AgentId a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= agents_.size())
    fail(Err::UnknownAgent, "agent " + std::to_string(a));
  const Agent& ag = agents_[static_cast<std::size_t>(a)];
  double v = 0.0;
  for (const auto& [g, qty] : ag.durables) v += qty * obj_.at(g, tick_);
  for (const auto& [g, qty] : ag.fresh) v += qty * obj_.at(g, tick_);
  for (const auto& [cls, units] : ledger_->wallet(a)) {
    const InstrumentClass& c = ledger_->instrument(cls);
    double idx = index_[static_cast<int>(group_of(c.kind))];
    if (idx <= 0.0) idx = 1.0;
    v += static_cast<double>(units * c.denomination) / idx;
  }
  return v;
}

double World::consumption_propensity(AgentId a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= agents_.size())
    fail(Err::UnknownAgent, "agent " + std::to_string(a));
  double ratio = 1.0;
  if (distortion_ref_ > 0.0) {
    double real = real_savings();
    double perceived = 0.0;
    for (const Agent& ag : agents_)
      if (ag.role != Role::CentralBank) perceived += perceived_savings(ag.id);
    double raw = perceived / std::max(real, 1e-9);
    ratio = std::clamp(raw / distortion_ref_, kRatioClampLo, kRatioClampHi);
  }
  return propensity_from_ratio(cfg_.propensity_base, cfg_.propensity_slope, ratio);
}

std::vector<double> World::psi_holdings() const {
  std::vector<double> h;
  h.reserve(agents_.size());
  for (const Agent& a : agents_)
    h.push_back(ledger_->balance_value(a.id, Group::Psi));
  return h;
}

void World::phase_metrics() {
  MetricsFrame f;
  f.tick = tick_;

  // per-group price indexes against the tick-0 posted prices
  for (int grp = 0; grp < kGroupCount; ++grp) {
    double now = 0.0, base = 0.0;
    for (std::size_t g = 0; g < basket_.size(); ++g) {
      now += basket_[g] * posted_[g][grp];
      base += basket_[g] * base_price_[g];
    }
    f.price_index[grp] = base > 0.0 ? now / base : 1.0;
  }
  index_ = f.price_index;

  // rolling velocity
  std::size_t window = static_cast<std::size_t>(std::max(1, cfg_.velocity_window));
  for (int grp = 0; grp < kGroupCount; ++grp) {
    auto& wv = window_value_[grp];
    auto& wo = window_outstanding_[grp];
    wv.push_back(tick_transfer_value_[grp]);
    wo.push_back(ledger_ ? ledger_->outstanding_value(static_cast<Group>(grp)) : 0.0);
    while (wv.size() > window) {
      wv.pop_front();
      wo.pop_front();
    }
    double value = 0.0, outstanding = 0.0;
    for (double v : wv) value += v;
    for (double o : wo) outstanding += o;
    double avg = outstanding / static_cast<double>(wo.size());
    f.velocity[grp] = avg > 0.0 ? value / avg : 0.0;
    f.outstanding[grp] = ledger_ ? ledger_->outstanding_units(static_cast<Group>(grp)) : 0;
  }

  // wealth distribution, central bank excluded; net of debts, floored at zero
  // so insolvent agents count as propertyless rather than breaking the gini
  std::vector<double> wealth;
  wealth.reserve(agents_.size());
  for (const Agent& a : agents_) {
    if (a.role == Role::CentralBank) continue;
    double w = 0.0;
    for (const auto& [g, qty] : a.durables) w += qty * obj_.at(g, tick_);
    for (const auto& [g, qty] : a.fresh) w += qty * obj_.at(g, tick_);
    for (const auto& [cls, units] : ledger_->wallet(a.id)) {
      const InstrumentClass& c = ledger_->instrument(cls);
      double idx = f.price_index[static_cast<int>(group_of(c.kind))];
      if (idx <= 0.0) idx = 1.0;
      w += static_cast<double>(units * c.denomination) / idx;
    }
    if (fiat_) {
      double idx = f.price_index[static_cast<int>(Group::Fiat)];
      if (idx <= 0.0) idx = 1.0;
      w -= fiat_->debt_by_agent[static_cast<std::size_t>(a.id)] / idx;
    }
    {
      double idx = f.price_index[static_cast<int>(Group::Iou)];
      if (idx <= 0.0) idx = 1.0;
      w -= static_cast<double>(own_iou_outstanding_value(a.id)) / idx;
    }
    wealth.push_back(std::max(0.0, w));
  }
  bool any_positive = false;
  for (double w : wealth)
    if (w > 0.0) any_positive = true;
  f.gini = any_positive ? gini(wealth) : 0.0;

  f.real_savings = real_savings();
  double perceived = 0.0;
  for (const Agent& a : agents_)
    if (a.role != Role::CentralBank) perceived += perceived_savings(a.id);
  f.perceived_real_ratio = f.real_savings > 1e-9 ? perceived / f.real_savings : 0.0;

  std::vector<double> holdings = psi_holdings();
  if (!prev_psi_holdings_.empty() && prev_psi_holdings_.size() == holdings.size())
    f.distribution_shift = distribution_shift(prev_psi_holdings_, holdings);
  prev_psi_holdings_ = holdings;
  if (keep_detail_) {
    double sum = 0.0;
    for (double h : holdings) sum += h;
    f.psi_distribution = std::move(holdings);
    if (sum > 0.0)
      for (double& h : f.psi_distribution) h /= sum;
  }

  f.aggregate_consumption = tick_consumption_value_;

  // anchor or update the perceived/real reference after this tick's use
  double raw = f.perceived_real_ratio;
  if (distortion_ref_ <= 0.0) {
    if (raw > 0.0) distortion_ref_ = raw;
  } else {
    distortion_ref_ += cfg_.distortion_ref_rate * (raw - distortion_ref_);
  }

  frames_.push_back(std::move(f));
}

void World::seed_metrics_frame() { phase_metrics(); }

const MetricsFrame& World::latest_frame() const {
  if (frames_.empty()) fail(Err::InvalidConfig, "no frames yet");
  return frames_.back();
}

double World::total_produced(GoodId g) const {
  return produced_.at(static_cast<std::size_t>(g));
}
double World::total_consumed_qty(GoodId g) const {
  return consumed_qty_.at(static_cast<std::size_t>(g));
}
double World::total_expired(GoodId g) const { return expired_.at(static_cast<std::size_t>(g)); }
double World::inventory_qty(GoodId g) const {
  double q = 0.0;
  for (const Agent& a : agents_) q += a.stock(g);
  return q;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "tick,gini,price_index_commodity,price_index_iou,price_index_psi,price_index_fiat,"
         "velocity_commodity,velocity_iou,velocity_psi,velocity_fiat,real_savings,"
         "perceived_real_ratio,distribution_shift,aggregate_consumption,"
         "outstanding_commodity,outstanding_iou,outstanding_psi,outstanding_fiat\n";
}

void append_metrics_csv(std::string& out, const MetricsFrame& f) {
  out += std::to_string(static_cast<long long>(f.tick));
  out += ',';
  out += fmt(f.gini);
  for (int grp = 0; grp < kGroupCount; ++grp) {
    out += ',';
    out += fmt(f.price_index[grp]);
  }
  for (int grp = 0; grp < kGroupCount; ++grp) {
    out += ',';
    out += fmt(f.velocity[grp]);
  }
  out += ',';
  out += fmt(f.real_savings);
  out += ',';
  out += fmt(f.perceived_real_ratio);
  out += ',';
  out += fmt(f.distribution_shift);
  out += ',';
  out += fmt(f.aggregate_consumption);
  for (int grp = 0; grp < kGroupCount; ++grp) {
    out += ',';
    out += std::to_string(static_cast<long long>(f.outstanding[grp]));
  }
  out += '\n';
}

namespace {

RunSummary summarize(const ScenarioConfig& cfg, const std::vector<MetricsFrame>& frames,
                     const World& world) {
  RunSummary s;
  if (frames.size() >= 2) {
    std::vector<double> ticks, ginis;
    for (const MetricsFrame& f : frames) {
      ticks.push_back(static_cast<double>(f.tick));
      ginis.push_back(f.gini);
    }
    s.gini_slope = ols_slope(ticks, ginis);
  }
  const auto& deltas = world.cantillon_deltas();
  if (!deltas.empty() && deltas.size() == world.cantillon_ranks().size()) {
    bool constant = true;
    for (double r : world.cantillon_ranks())
      if (r != world.cantillon_ranks().front()) constant = false;
    if (!constant) {
      s.cantillon_slope = cantillon_gradient(world.cantillon_ranks(), deltas);
      s.cantillon_measured = true;
    }
  }
  if (frames.size() > 1) {
    std::vector<double> consumption;
    for (std::size_t i = 1; i < frames.size(); ++i)
      consumption.push_back(frames[i].aggregate_consumption);
    std::size_t baseline = std::min<std::size_t>(400, consumption.size() / 3);
    if (baseline >= 2 && consumption.size() >= baseline + 10) {
      s.episodes = detect_boom_bust(consumption, baseline, 1.0, 600, 5);
    }
    std::size_t burnin = frames.size() / 4;
    double shift_sum = 0.0;
    std::size_t shift_n = 0;
    for (std::size_t i = std::max<std::size_t>(1, burnin); i < frames.size(); ++i) {
      shift_sum += frames[i].distribution_shift;
      ++shift_n;
    }
    s.psi_mean_shift = shift_n ? shift_sum / static_cast<double>(shift_n) : 0.0;
    std::size_t third = frames.size() / 3;
    double drift_sum = 0.0;
    std::size_t drift_n = 0;
    int psi = static_cast<int>(Group::Psi);
    for (std::size_t i = frames.size() - third; i < frames.size(); ++i) {
      if (i == 0) continue;
      double prev = frames[i - 1].price_index[psi];
      if (prev > 0.0) {
        drift_sum += std::abs(frames[i].price_index[psi] / prev - 1.0);
        ++drift_n;
      }
    }
    s.psi_drift = drift_n ? drift_sum / static_cast<double>(drift_n) : 0.0;
    for (int grp = 0; grp < kGroupCount; ++grp) {
      double sum = 0.0;
      for (std::size_t i = 1; i < frames.size(); ++i) sum += frames[i].velocity[grp];
      s.mean_velocity[grp] = sum / static_cast<double>(frames.size() - 1);
    }
  }
  (void)cfg;
  return s;
}

}  // namespace

std::string summary_json(const ScenarioConfig& cfg, const RunResult& result) {
  using json = nlohmann::ordered_json;
  json j;
  j["regime"] = std::string(to_string(cfg.regime));
  j["agents"] = cfg.agents;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  const MetricsFrame& f = result.frames.back();
  json fin;
  fin["tick"] = f.tick;
  fin["gini"] = f.gini;
  fin["real_savings"] = f.real_savings;
  fin["perceived_real_ratio"] = f.perceived_real_ratio;
  fin["aggregate_consumption"] = f.aggregate_consumption;
  json pi, vel, out;
  for (int grp = 0; grp < kGroupCount; ++grp) {
    const char* name = to_string(static_cast<Group>(grp));
    pi[name] = f.price_index[grp];
    vel[name] = f.velocity[grp];
    out[name] = f.outstanding[grp];
  }
  fin["price_index"] = std::move(pi);
  fin["velocity"] = std::move(vel);
  fin["outstanding"] = std::move(out);
  j["final"] = std::move(fin);
  j["gini_slope"] = result.summary.gini_slope;
  json cant;
  cant["measured"] = result.summary.cantillon_measured;
  cant["slope"] = result.summary.cantillon_slope;
  j["cantillon"] = std::move(cant);
  json eps = json::array();
  for (const Episode& e : result.summary.episodes) {
    json item;
    item["start"] = e.start;
    item["peak"] = e.peak;
    item["trough"] = e.trough;
    eps.push_back(std::move(item));
  }
  j["episodes"] = std::move(eps);
  json psi;
  psi["mean_shift"] = result.summary.psi_mean_shift;
  psi["drift"] = result.summary.psi_drift;
  j["psi"] = std::move(psi);
  json mv;
  for (int grp = 0; grp < kGroupCount; ++grp)
    mv[to_string(static_cast<Group>(grp))] = result.summary.mean_velocity[grp];
  j["mean_velocity"] = std::move(mv);
  return j.dump(2) + "\n";
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  World world(cfg);

  std::ofstream events_file;
  std::string buffer;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    events_file.open(out_dir + "/events.csv", std::ios::binary);
    if (!events_file) fail(Err::InvalidConfig, "cannot write to " + out_dir);
    buffer = Ledger::csv_header();
    // instruments created at build time land in the log before tick 1
    for (const LedgerEvent& ev : world.ledger().events()) Ledger::append_csv(buffer, ev);
    events_file << buffer;
    buffer.clear();
    world.set_external_event_sink([&](const LedgerEvent& ev) {
      Ledger::append_csv(buffer, ev);
      if (buffer.size() > 1 << 16) {
        events_file << buffer;
        buffer.clear();
      }
    });
  }

  std::string metrics;
  if (!out_dir.empty()) metrics = metrics_csv_header();
  if (!out_dir.empty()) append_metrics_csv(metrics, world.latest_frame());
  for (Tick t = 0; t < cfg.horizon; ++t) {
    world.step();
    if (!out_dir.empty()) append_metrics_csv(metrics, world.latest_frame());
  }

  RunResult result;
  result.summary = summarize(cfg, world.frames(), world);
  result.frames = world.take_frames();

  if (!out_dir.empty()) {
    events_file << buffer;
    events_file.close();
    std::ofstream mf(out_dir + "/metrics.csv", std::ios::binary);
    mf << metrics;
    mf.close();
    std::ofstream sf(out_dir + "/summary.json", std::ios::binary);
    sf << summary_json(cfg, result);
    sf.close();
  }
  return result;
}

}  // namespace psim
