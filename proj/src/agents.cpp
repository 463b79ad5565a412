#include "psim/agents.hpp"

#include <algorithm>

namespace psim {

double ObjectiveValues::at(GoodId g, Tick) const {
  if (g < 0 || static_cast<std::size_t>(g) >= values_.size())
    fail(Err::UnknownGood, "good id " + std::to_string(g));
  return values_[static_cast<std::size_t>(g)];
}

double Agent::stock(GoodId g) const {
  double q = 0.0;
  auto it = durables.find(g);
  if (it != durables.end()) q += it->second;
  it = fresh.find(g);
  if (it != fresh.end()) q += it->second;
  return q;
}

void Agent::add_stock(GoodId g, double qty, bool durable) {
  if (qty <= 0.0) return;
  (durable ? durables : fresh)[g] += qty;
}

void Agent::take_stock(GoodId g, double qty) {
  if (qty <= 0.0) return;
  double have = stock(g);
  if (have + 1e-9 < qty)
    fail(Err::GoodsUnavailable, "agent " + std::to_string(id) + " has " + std::to_string(have) +
                                    " of good " + std::to_string(g) + ", needs " +
                                    std::to_string(qty));
  // fresh first; perishables are worthless tomorrow anyway
  auto it = fresh.find(g);
  if (it != fresh.end()) {
    double take = std::min(it->second, qty);
    it->second -= take;
    qty -= take;
    if (it->second <= 1e-12) fresh.erase(it);
  }
  if (qty > 1e-12) {
    auto d = durables.find(g);
    double have_d = d == durables.end() ? 0.0 : d->second;
    double take = std::min(have_d, qty);
    if (d != durables.end()) {
      d->second -= take;
      if (d->second <= 1e-12) durables.erase(d);
    }
  }
}

double subjective_value(const Agent& a, const ObjectiveValues& obj, const Bundle& bundle, Tick t) {
  double v = 0.0;
  for (const auto& [g, qty] : bundle) {
    double factor = 1.0;
    if (g >= 0 && static_cast<std::size_t>(g) < a.noise.size())
      factor = a.noise[static_cast<std::size_t>(g)];
    v += qty * obj.at(g, t) * factor;
  }
  return v;
}

double equity(const Agent& a, const ObjectiveValues& obj, const Ledger& ledger,
              const std::array<double, kGroupCount>& price_index,
              std::span<const double> debt_by_agent, Tick t) {
  double assets = 0.0;
  for (const auto& [g, qty] : a.durables) assets += qty * obj.at(g, t);
  for (const auto& [g, qty] : a.fresh) assets += qty * obj.at(g, t);
  for (const auto& [cls, units] : ledger.wallet(a.id)) {
    const InstrumentClass& c = ledger.instrument(cls);
    double idx = price_index[static_cast<int>(group_of(c.kind))];
    if (idx <= 0.0) idx = 1.0;
    assets += static_cast<double>(units * c.denomination) / idx;
  }
  double liabilities = 0.0;
  double idx_iou = price_index[static_cast<int>(Group::Iou)];
  double idx_psi = price_index[static_cast<int>(Group::Psi)];
  if (idx_iou <= 0.0) idx_iou = 1.0;
  if (idx_psi <= 0.0) idx_psi = 1.0;
  liabilities += ledger.issued_liability_value(a.id, InstrumentKind::Iou) / idx_iou;
  liabilities += ledger.issued_liability_value(a.id, InstrumentKind::Invoice) / idx_psi;
  if (a.id >= 0 && static_cast<std::size_t>(a.id) < debt_by_agent.size())
    liabilities += debt_by_agent[static_cast<std::size_t>(a.id)];
  return assets - liabilities;
}

std::optional<std::size_t> decide_action(std::span<const ActionCandidate> candidates) {
  std::optional<std::size_t> best;
  double best_margin = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double margin = candidates[i].interest - candidates[i].cost;
    if (margin > 0.0 && (!best || margin > best_margin)) {
      best = i;
      best_margin = margin;
    }
  }
  return best;
}

std::vector<ClassId> spending_order(const Agent&, std::vector<ClassId> options,
                                    const Ledger& ledger, RegimeKind regime,
                                    bool tax_currency_first) {
  auto rank = [&](ClassId cls) -> int {
    switch (ledger.instrument(cls).kind) {
      case InstrumentKind::Psi:
      case InstrumentKind::Invoice:
        return 0;  // someone else is contractually bound to take these
      case InstrumentKind::Iou:
        return tax_currency_first ? 2 : 1;
      case InstrumentKind::FiatNote:
      case InstrumentKind::FiatCredit:
        return (regime == RegimeKind::Fiat && tax_currency_first) ? 1 : 3;
      case InstrumentKind::CommodityMoney:
        return 3;
    }
    return 3;
  };
  std::stable_sort(options.begin(), options.end(), [&](ClassId x, ClassId y) {
    int rx = rank(x), ry = rank(y);
    if (rx != ry) return rx < ry;
    return x < y;
  });
  return options;
}

}  // namespace psim
