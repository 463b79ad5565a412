#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psim/goods.hpp"
#include "psim/types.hpp"

namespace psim {

struct GoodSpec {
  std::string name;
  bool durable = true;
  double cost = 1.0;
  double utility = 1.0;
};

struct FiatConfig {
  double policy_rate = 0.0005;
  double reserve_ratio_max = 10.0;
  double tax_rate = 0.05;
  bool legal_tender = true;
  Count initial_endowment = 100;  // notes per household at tick 0
  Count reserves = 0;             // 0 derives half the initial note issue
  Tick expansion_interval = 0;    // 0 disables periodic expansion
  double expansion_fraction = 0.0;
  Tick expansion_start = 0;
  Tick shock_tick = -1;           // one-off expansion event
  double shock_fraction = 0.0;
  Count loan_unit = 50;
  int bank_owners = 0;            // households 0..n-1 receive the bank's income as dividends
  Tick cantillon_tick = -1;       // purchasing-power snapshot; -1 = first expansion
  Tick cantillon_window = 100;    // deltas freeze this many ticks after the snapshot
};

struct PsiConfig {
  double vote_threshold = 0.5;
  double service_demand_rate = 0.01;
  Count service_fee = 1;
  bool provider_collects = true;
  Tick project_interval = 150;  // 0 = single project at first_project_tick
  Tick first_project_tick = 1;
  Count project_value = 600;
  double input_cost_fraction = 0.5;
  double benefit_factor = 1.5;
};

struct IouConfig {
  bool enabled = true;
  Count issue_cap = 10;  // outstanding value units per private issuer
};

struct CommodityConfig {
  std::string good;          // catalog name; empty disables commodity money
  Count endowment_units = 0; // per household at tick 0
};

struct ScenarioConfig {
  RegimeKind regime = RegimeKind::BarterOnly;  // required
  int agents = 0;                              // required: household count
  Tick horizon = 0;                            // required
  std::uint64_t seed = 0;                      // required
  int firms = 0;                               // of the households, produce double
  double noise_sigma = 0.25;
  double acceptance_threshold = 0.5;
  double time_preference = 0.9;
  double propensity_base = 0.1;
  double propensity_slope = 0.5;
  double cash_target = 3.0;  // real balance an agent likes to hold, per group; 0 disables
  double distortion_ref_rate = 0.005;
  double marketability_rate = 0.05;
  double marketability_baseline = 0.1;
  double marketability_initial = 0.1;
  double price_eta = 0.1;
  double price_floor = 0.01;
  double production_qty = 1.0;
  double endowment_qty = 3.0;
  Tick reshuffle_tick = -1;  // rotate specialties once at this tick
  int velocity_window = 50;
  std::vector<GoodSpec> goods;  // default catalog when empty in the file
  FiatConfig fiat;
  PsiConfig psi;
  IouConfig iou;
  CommodityConfig commodity;
};

std::vector<GoodSpec> default_goods();

// strict: unknown keys anywhere are rejected and named, missing required
// fields and out-of-range values throw with the offending key in the message
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

}  // namespace psim
