#pragma once

#include <array>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psim/agents.hpp"
#include "psim/exchange.hpp"
#include "psim/goods.hpp"
#include "psim/instruments.hpp"
#include "psim/metrics.hpp"
#include "psim/regimes.hpp"
#include "psim/rng.hpp"
#include "psim/scenario.hpp"
#include "psim/types.hpp"

namespace psim {

// closed form for the consumption boost: base x (1 + slope x (ratio - 1)),
// clamped to [0.001, 0.999]
double propensity_from_ratio(double base, double slope, double ratio);

// Single-writer stepper. One tick runs, in order: production, regime events,
// meetings, consumption and expiry, posted-price update, marketability decay,
// metrics snapshot. All mutation happens here; a run is a pure function of
// (config, seed).
class World {
 public:
  explicit World(const ScenarioConfig& cfg);

  void step();
  Tick tick() const { return tick_; }

  // value of all real goods held, durables plus still-fresh perishables, at
  // objective values
  double real_savings() const;
  // what the agent thinks its currency plus inventory are worth, holdings
  // deflated by the group price index
  double perceived_savings(AgentId a) const;
  double consumption_propensity(AgentId a) const;

  const MetricsFrame& latest_frame() const;
  const std::vector<MetricsFrame>& frames() const { return frames_; }
  std::vector<MetricsFrame> take_frames() { return std::move(frames_); }

  // chained after the internal bookkeeping sink; survives for the world's life
  void set_external_event_sink(std::function<void(const LedgerEvent&)> sink);
  // desk-scale worlds keep full event and contract history; large runs do not
  bool keeps_detail() const { return keep_detail_; }

  const ScenarioConfig& config() const { return cfg_; }
  const GoodsCatalog& catalog() const { return catalog_; }
  const ObjectiveValues& objective_values() const { return obj_; }
  Ledger& ledger() { return *ledger_; }
  const Ledger& ledger() const { return *ledger_; }
  ContractBook& contracts() { return contracts_; }
  const std::vector<Agent>& agents() const { return agents_; }
  Agent& agent(AgentId a) { return agents_.at(static_cast<std::size_t>(a)); }
  const MarketabilityTable& marketability() const { return market_; }
  const CredibilityBook& credibility() const { return cred_; }
  std::optional<FiatState>& fiat() { return fiat_; }
  std::optional<PsiState>& psi() { return psi_; }
  const std::optional<FiatState>& fiat() const { return fiat_; }
  const std::optional<PsiState>& psi() const { return psi_; }
  double posted_price(GoodId g, Group grp) const;
  RegimeContext regime_context() const;
  const std::array<double, kGroupCount>& price_index_now() const { return index_; }

  // per-household purchasing power deltas between the expansion snapshot and
  // now; empty until the snapshot tick has passed
  std::vector<double> cantillon_deltas() const;
  const std::vector<double>& cantillon_ranks() const { return cantillon_ranks_; }

  double total_produced(GoodId g) const;
  double total_consumed_qty(GoodId g) const;
  double total_expired(GoodId g) const;
  double inventory_qty(GoodId g) const;

 private:
  void build_goods();
  void build_agents();
  void build_instruments();
  void seed_metrics_frame();

  void phase_production();
  void phase_regime_events();
  void phase_meetings();
  void phase_consumption();
  void phase_prices();
  void phase_marketability();
  void phase_metrics();

  void reshuffle_specialties();
  void psi_project_cadence();
  void psi_fund_and_deliver();
  void psi_provider_buyback();
  void psi_service_sink();
  void fiat_interest();
  void institutional_spend(AgentId spender_id, ClassId cls, Group grp);
  void fiscal_recycle();
  void psi_provider_spend_down();
  void fiat_expansion_events();
  void cantillon_snapshot_if_due();

  void meet(AgentId x, AgentId y);
  void try_redeem(AgentId bearer, AgentId counterpart);
  bool try_trade(AgentId seller, AgentId buyer);

  // everything the agent has enjoyed or still holds, in goods terms:
  // cumulative consumption + inventory at objective values + (fiat - debt)
  // deflated by the basket price. Consumption is included so spending cheap
  // borrowed money on goods that get eaten still counts as a gain.
  double real_position_in_goods(AgentId a, double basket_cost) const;

  ClassId iou_class_of(AgentId issuer);
  bool size_monetary_trade(double price, double stock, Count denom, Count& units,
                           double& qty) const;
  double unit_value(ClassId cls) const;  // denomination / current group index
  double spend_factor(InstrumentKind k) const;
  double cash_factor(AgentId a, Group grp) const;
  double subj(AgentId a, GoodId g, double qty) const;
  Count own_iou_outstanding_value(AgentId a) const;
  Count iou_cap(AgentId a) const;
  void note_trade_tax(AgentId seller, double value_units);
  void record_demand_supply(GoodId g, Group grp, double demand, double supply);
  std::vector<double> psi_holdings() const;
  double basket_cost_fiat() const;

  ScenarioConfig cfg_;
  GoodsCatalog catalog_;
  ObjectiveValues obj_;
  std::vector<Agent> agents_;
  std::unique_ptr<Ledger> ledger_;
  ContractBook contracts_;
  CredibilityBook cred_;
  MarketabilityTable market_;
  std::optional<FiatState> fiat_;
  std::optional<PsiState> psi_;
  Rng rng_;
  Tick tick_ = 0;

  std::vector<ClassId> iou_class_;  // per agent, kNoClass until first issue
  ClassId commodity_class_ = kNoClass;

  // posted prices per good per group, seeded from catalog cost
  std::vector<std::array<double, kGroupCount>> posted_;
  std::vector<std::array<double, kGroupCount>> demand_, supply_;  // per tick
  std::vector<double> base_price_;            // tick-0 snapshot, index base
  std::vector<double> basket_;                // index weights: production shares
  std::array<double, kGroupCount> index_{1.0, 1.0, 1.0, 1.0};

  std::vector<std::uint8_t> traded_this_tick_;   // per good, marketability input
  std::vector<std::uint8_t> refused_this_tick_;  // offered as a medium and turned down

  // rolling velocity window
  std::array<std::deque<double>, kGroupCount> window_value_;
  std::array<std::deque<double>, kGroupCount> window_outstanding_;
  std::array<double, kGroupCount> tick_transfer_value_{};

  double distortion_ref_ = 0.0;  // EMA of perceived/real; 0 = not yet anchored
  double tick_consumption_value_ = 0.0;
  std::vector<double> produced_, consumed_qty_, expired_;
  std::vector<double> eaten_value_by_agent_;  // cumulative, objective values

  std::vector<double> prev_psi_holdings_;
  std::vector<MetricsFrame> frames_;

  Tick cantillon_tick_ = -1;
  std::vector<double> cantillon_base_;    // per household net worth in goods at snapshot
  std::vector<double> cantillon_frozen_;  // deltas at snapshot + window, then fixed
  std::vector<double> cantillon_ranks_;   // access rank per household
  int project_counter_ = 0;
  bool keep_detail_ = true;
  std::function<void(const LedgerEvent&)> external_sink_;
};

struct RunSummary {
  double gini_slope = 0.0;
  double cantillon_slope = 0.0;
  bool cantillon_measured = false;
  std::vector<Episode> episodes;
  double psi_mean_shift = 0.0;   // after the burn-in quarter
  double psi_drift = 0.0;        // mean |relative PSI index change| per tick, final third
  std::array<double, kGroupCount> mean_velocity{0.0, 0.0, 0.0, 0.0};
};

struct RunResult {
  std::vector<MetricsFrame> frames;
  RunSummary summary;
};

// runs the scenario; when out_dir is non-empty writes events.csv, metrics.csv
// and summary.json there (bytes are a pure function of config and seed)
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

std::string metrics_csv_header();
void append_metrics_csv(std::string& out, const MetricsFrame& f);
std::string summary_json(const ScenarioConfig& cfg, const RunResult& result);

}  // namespace psim
