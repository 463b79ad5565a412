#include "psim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace psim {

using json = nlohmann::ordered_json;

std::vector<GoodSpec> default_goods() {
  return {
      {"grain", false, 1.0, 1.0},
      {"cloth", true, 1.0, 1.0},
      {"tools", true, 1.2, 1.2},
      {"pottery", true, 0.9, 0.9},
      {"salt", true, 1.1, 1.4},
  };
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object())
    fail(Err::SyntaxError, (path.empty() ? std::string("document") : path) + " must be an object");
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& known) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) fail(Err::UnknownKey, join(path, item.key()));
  }
}

double get_num(const json& j, const std::string& path, const std::string& key, double def,
               bool* present = nullptr) {
  if (!j.contains(key)) {
    if (present) *present = false;
    return def;
  }
  if (present) *present = true;
  const json& v = j.at(key);
  if (!v.is_number()) fail(Err::SyntaxError, join(path, key) + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& j, const std::string& path, const std::string& key,
                     std::int64_t def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(Err::SyntaxError, join(path, key) + " must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key, bool def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(Err::SyntaxError, join(path, key) + " must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string()) fail(Err::SyntaxError, join(path, key) + " must be a string");
  return v.get<std::string>();
}

void require_range(bool ok, const std::string& path, const std::string& key,
                   const std::string& what) {
  if (!ok) fail(Err::RangeViolation, join(path, key) + " " + what);
}

FiatConfig parse_fiat(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"policy_rate", "reserve_ratio_max", "tax_rate", "legal_tender",
                  "initial_endowment", "reserves", "expansion_interval", "expansion_fraction",
                  "expansion_start", "shock_tick", "shock_fraction", "loan_unit",
                  "bank_owners", "cantillon_tick", "cantillon_window"});
  FiatConfig f;
  f.policy_rate = get_num(j, path, "policy_rate", f.policy_rate);
  require_range(f.policy_rate >= 0.0, path, "policy_rate", "must be >= 0");
  f.reserve_ratio_max = get_num(j, path, "reserve_ratio_max", f.reserve_ratio_max);
  require_range(f.reserve_ratio_max >= 1.0, path, "reserve_ratio_max", "must be >= 1");
  f.tax_rate = get_num(j, path, "tax_rate", f.tax_rate);
  require_range(f.tax_rate >= 0.0 && f.tax_rate < 1.0, path, "tax_rate", "must be in [0, 1)");
  f.legal_tender = get_bool(j, path, "legal_tender", f.legal_tender);
  f.initial_endowment = get_int(j, path, "initial_endowment", f.initial_endowment);
  require_range(f.initial_endowment >= 0, path, "initial_endowment", "must be >= 0");
  f.reserves = get_int(j, path, "reserves", f.reserves);
  require_range(f.reserves >= 0, path, "reserves", "must be >= 0");
  f.expansion_interval = get_int(j, path, "expansion_interval", f.expansion_interval);
  require_range(f.expansion_interval >= 0, path, "expansion_interval", "must be >= 0");
  f.expansion_fraction = get_num(j, path, "expansion_fraction", f.expansion_fraction);
  require_range(f.expansion_fraction >= 0.0, path, "expansion_fraction", "must be >= 0");
  f.expansion_start = get_int(j, path, "expansion_start", f.expansion_start);
  f.shock_tick = get_int(j, path, "shock_tick", f.shock_tick);
  f.shock_fraction = get_num(j, path, "shock_fraction", f.shock_fraction);
  require_range(f.shock_fraction >= 0.0, path, "shock_fraction", "must be >= 0");
  f.loan_unit = get_int(j, path, "loan_unit", f.loan_unit);
  require_range(f.loan_unit >= 1, path, "loan_unit", "must be >= 1");
  f.bank_owners = static_cast<int>(get_int(j, path, "bank_owners", f.bank_owners));
  require_range(f.bank_owners >= 0, path, "bank_owners", "must be >= 0");
  f.cantillon_tick = get_int(j, path, "cantillon_tick", f.cantillon_tick);
  f.cantillon_window = get_int(j, path, "cantillon_window", f.cantillon_window);
  require_range(f.cantillon_window >= 1, path, "cantillon_window", "must be >= 1");
  return f;
}

PsiConfig parse_psi(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"vote_threshold", "service_demand_rate", "service_fee", "provider_collects",
                  "project_interval", "first_project_tick", "project_value",
                  "input_cost_fraction", "benefit_factor"});
  PsiConfig p;
  p.vote_threshold = get_num(j, path, "vote_threshold", p.vote_threshold);
  require_range(p.vote_threshold >= 0.0 && p.vote_threshold <= 1.0, path, "vote_threshold",
                "must be in [0, 1]");
  p.service_demand_rate = get_num(j, path, "service_demand_rate", p.service_demand_rate);
  require_range(p.service_demand_rate >= 0.0 && p.service_demand_rate <= 1.0, path,
                "service_demand_rate", "must be in [0, 1]");
  p.service_fee = get_int(j, path, "service_fee", p.service_fee);
  require_range(p.service_fee >= 1, path, "service_fee", "must be >= 1");
  p.provider_collects = get_bool(j, path, "provider_collects", p.provider_collects);
  p.project_interval = get_int(j, path, "project_interval", p.project_interval);
  require_range(p.project_interval >= 0, path, "project_interval", "must be >= 0");
  p.first_project_tick = get_int(j, path, "first_project_tick", p.first_project_tick);
  require_range(p.first_project_tick >= 0, path, "first_project_tick", "must be >= 0");
  p.project_value = get_int(j, path, "project_value", p.project_value);
  require_range(p.project_value >= 0, path, "project_value", "must be >= 0");
  p.input_cost_fraction = get_num(j, path, "input_cost_fraction", p.input_cost_fraction);
  require_range(p.input_cost_fraction >= 0.0 && p.input_cost_fraction <= 1.0, path,
                "input_cost_fraction", "must be in [0, 1]");
  p.benefit_factor = get_num(j, path, "benefit_factor", p.benefit_factor);
  require_range(p.benefit_factor >= 0.0, path, "benefit_factor", "must be >= 0");
  return p;
}

IouConfig parse_iou(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"enabled", "issue_cap"});
  IouConfig c;
  c.enabled = get_bool(j, path, "enabled", c.enabled);
  c.issue_cap = get_int(j, path, "issue_cap", c.issue_cap);
  require_range(c.issue_cap >= 0, path, "issue_cap", "must be >= 0");
  return c;
}

CommodityConfig parse_commodity(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"good", "endowment_units"});
  CommodityConfig c;
  c.good = get_str(j, path, "good", c.good);
  c.endowment_units = get_int(j, path, "endowment_units", c.endowment_units);
  require_range(c.endowment_units >= 0, path, "endowment_units", "must be >= 0");
  return c;
}

std::vector<GoodSpec> parse_goods(const json& j, const std::string& path) {
  if (!j.is_array()) fail(Err::SyntaxError, path + " must be an array");
  std::vector<GoodSpec> goods;
  int i = 0;
  for (const json& item : j) {
    std::string p = path + "[" + std::to_string(i++) + "]";
    expect_object(item, p);
    reject_unknown(item, p, {"name", "durable", "cost", "utility"});
    GoodSpec g;
    g.name = get_str(item, p, "name", "");
    if (g.name.empty()) fail(Err::MissingField, join(p, "name"));
    g.durable = get_bool(item, p, "durable", g.durable);
    g.cost = get_num(item, p, "cost", g.cost);
    require_range(g.cost > 0.0, p, "cost", "must be > 0");
    g.utility = get_num(item, p, "utility", g.utility);
    require_range(g.utility > 0.0, p, "utility", "must be > 0");
    goods.push_back(std::move(g));
  }
  if (goods.empty()) fail(Err::RangeViolation, path + " must not be empty");
  return goods;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Err::SyntaxError, e.what());
  }
  expect_object(j, "");
  reject_unknown(j, "",
                 {"regime", "agents", "horizon", "seed", "firms", "noise_sigma",
                  "acceptance_threshold", "time_preference", "propensity_base",
                  "propensity_slope", "cash_target", "distortion_ref_rate", "marketability_rate",
                  "marketability_baseline", "marketability_initial", "price_eta", "price_floor",
                  "production_qty", "endowment_qty", "reshuffle_tick", "velocity_window", "goods",
                  "fiat", "psi", "iou", "commodity"});

  ScenarioConfig cfg;
  if (!j.contains("regime")) fail(Err::MissingField, "regime");
  std::string regime = get_str(j, "", "regime", "");
  if (regime == "fiat")
    cfg.regime = RegimeKind::Fiat;
  else if (regime == "psi")
    cfg.regime = RegimeKind::Psi;
  else if (regime == "barter")
    cfg.regime = RegimeKind::BarterOnly;
  else
    fail(Err::RangeViolation, "regime must be one of fiat, psi, barter; got \"" + regime + "\"");

  if (!j.contains("agents")) fail(Err::MissingField, "agents");
  cfg.agents = static_cast<int>(get_int(j, "", "agents", 0));
  require_range(cfg.agents >= 0, "", "agents", "must be >= 0");
  if (!j.contains("horizon")) fail(Err::MissingField, "horizon");
  cfg.horizon = get_int(j, "", "horizon", 0);
  require_range(cfg.horizon >= 0, "", "horizon", "must be >= 0");
  if (!j.contains("seed")) fail(Err::MissingField, "seed");
  {
    const json& v = j.at("seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail(Err::SyntaxError, "seed must be an integer");
    cfg.seed = v.get<std::uint64_t>();
  }

  cfg.firms = static_cast<int>(get_int(j, "", "firms", cfg.firms));
  require_range(cfg.firms >= 0 && cfg.firms <= cfg.agents, "", "firms",
                "must be between 0 and agents");
  cfg.noise_sigma = get_num(j, "", "noise_sigma", cfg.noise_sigma);
  require_range(cfg.noise_sigma >= 0.0, "", "noise_sigma", "must be >= 0");
  cfg.acceptance_threshold = get_num(j, "", "acceptance_threshold", cfg.acceptance_threshold);
  require_range(cfg.acceptance_threshold >= 0.0 && cfg.acceptance_threshold <= 1.0, "",
                "acceptance_threshold", "must be in [0, 1]");
  cfg.time_preference = get_num(j, "", "time_preference", cfg.time_preference);
  require_range(cfg.time_preference > 0.0 && cfg.time_preference <= 1.0, "", "time_preference",
                "must be in (0, 1]");
  cfg.propensity_base = get_num(j, "", "propensity_base", cfg.propensity_base);
  require_range(cfg.propensity_base > 0.0 && cfg.propensity_base < 1.0, "", "propensity_base",
                "must be in (0, 1)");
  cfg.propensity_slope = get_num(j, "", "propensity_slope", cfg.propensity_slope);
  require_range(cfg.propensity_slope >= 0.0, "", "propensity_slope", "must be >= 0");
  cfg.cash_target = get_num(j, "", "cash_target", cfg.cash_target);
  require_range(cfg.cash_target >= 0.0, "", "cash_target", "must be >= 0");
  cfg.distortion_ref_rate = get_num(j, "", "distortion_ref_rate", cfg.distortion_ref_rate);
  require_range(cfg.distortion_ref_rate >= 0.0 && cfg.distortion_ref_rate <= 1.0, "",
                "distortion_ref_rate", "must be in [0, 1]");
  cfg.marketability_rate = get_num(j, "", "marketability_rate", cfg.marketability_rate);
  require_range(cfg.marketability_rate >= 0.0 && cfg.marketability_rate <= 1.0, "",
                "marketability_rate", "must be in [0, 1]");
  cfg.marketability_baseline = get_num(j, "", "marketability_baseline", cfg.marketability_baseline);
  require_range(cfg.marketability_baseline >= 0.0 && cfg.marketability_baseline <= 1.0, "",
                "marketability_baseline", "must be in [0, 1]");
  cfg.marketability_initial = get_num(j, "", "marketability_initial", cfg.marketability_initial);
  require_range(cfg.marketability_initial >= 0.0 && cfg.marketability_initial <= 1.0, "",
                "marketability_initial", "must be in [0, 1]");
  cfg.price_eta = get_num(j, "", "price_eta", cfg.price_eta);
  require_range(cfg.price_eta >= 0.0 && cfg.price_eta <= 1.0, "", "price_eta", "must be in [0, 1]");
  cfg.price_floor = get_num(j, "", "price_floor", cfg.price_floor);
  require_range(cfg.price_floor > 0.0, "", "price_floor", "must be > 0");
  cfg.production_qty = get_num(j, "", "production_qty", cfg.production_qty);
  require_range(cfg.production_qty >= 0.0, "", "production_qty", "must be >= 0");
  cfg.endowment_qty = get_num(j, "", "endowment_qty", cfg.endowment_qty);
  require_range(cfg.endowment_qty >= 0.0, "", "endowment_qty", "must be >= 0");
  cfg.reshuffle_tick = get_int(j, "", "reshuffle_tick", cfg.reshuffle_tick);
  cfg.velocity_window = static_cast<int>(get_int(j, "", "velocity_window", cfg.velocity_window));
  require_range(cfg.velocity_window >= 1, "", "velocity_window", "must be >= 1");

  cfg.goods = j.contains("goods") ? parse_goods(j.at("goods"), "goods") : default_goods();
  if (j.contains("fiat")) cfg.fiat = parse_fiat(j.at("fiat"), "fiat");
  if (j.contains("psi")) cfg.psi = parse_psi(j.at("psi"), "psi");
  if (j.contains("iou")) cfg.iou = parse_iou(j.at("iou"), "iou");
  if (j.contains("commodity")) cfg.commodity = parse_commodity(j.at("commodity"), "commodity");

  if (!cfg.commodity.good.empty()) {
    bool found = false;
    for (const auto& g : cfg.goods)
      if (g.name == cfg.commodity.good) found = true;
    if (!found)
      fail(Err::InvalidConfig, "commodity.good \"" + cfg.commodity.good + "\" is not in goods");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::InvalidConfig, "cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json j;
  j["regime"] = std::string(to_string(cfg.regime));
  j["agents"] = cfg.agents;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  j["firms"] = cfg.firms;
  j["noise_sigma"] = cfg.noise_sigma;
  j["acceptance_threshold"] = cfg.acceptance_threshold;
  j["time_preference"] = cfg.time_preference;
  j["propensity_base"] = cfg.propensity_base;
  j["propensity_slope"] = cfg.propensity_slope;
  j["cash_target"] = cfg.cash_target;
  j["distortion_ref_rate"] = cfg.distortion_ref_rate;
  j["marketability_rate"] = cfg.marketability_rate;
  j["marketability_baseline"] = cfg.marketability_baseline;
  j["marketability_initial"] = cfg.marketability_initial;
  j["price_eta"] = cfg.price_eta;
  j["price_floor"] = cfg.price_floor;
  j["production_qty"] = cfg.production_qty;
  j["endowment_qty"] = cfg.endowment_qty;
  j["reshuffle_tick"] = cfg.reshuffle_tick;
  j["velocity_window"] = cfg.velocity_window;
  j["goods"] = json::array();
  for (const auto& g : cfg.goods) {
    json item;
    item["name"] = g.name;
    item["durable"] = g.durable;
    item["cost"] = g.cost;
    item["utility"] = g.utility;
    j["goods"].push_back(std::move(item));
  }
  json fiat;
  fiat["policy_rate"] = cfg.fiat.policy_rate;
  fiat["reserve_ratio_max"] = cfg.fiat.reserve_ratio_max;
  fiat["tax_rate"] = cfg.fiat.tax_rate;
  fiat["legal_tender"] = cfg.fiat.legal_tender;
  fiat["initial_endowment"] = cfg.fiat.initial_endowment;
  fiat["reserves"] = cfg.fiat.reserves;
  fiat["expansion_interval"] = cfg.fiat.expansion_interval;
  fiat["expansion_fraction"] = cfg.fiat.expansion_fraction;
  fiat["expansion_start"] = cfg.fiat.expansion_start;
  fiat["shock_tick"] = cfg.fiat.shock_tick;
  fiat["shock_fraction"] = cfg.fiat.shock_fraction;
  fiat["loan_unit"] = cfg.fiat.loan_unit;
  fiat["bank_owners"] = cfg.fiat.bank_owners;
  fiat["cantillon_tick"] = cfg.fiat.cantillon_tick;
  fiat["cantillon_window"] = cfg.fiat.cantillon_window;
  j["fiat"] = std::move(fiat);
  json psi;
  psi["vote_threshold"] = cfg.psi.vote_threshold;
  psi["service_demand_rate"] = cfg.psi.service_demand_rate;
  psi["service_fee"] = cfg.psi.service_fee;
  psi["provider_collects"] = cfg.psi.provider_collects;
  psi["project_interval"] = cfg.psi.project_interval;
  psi["first_project_tick"] = cfg.psi.first_project_tick;
  psi["project_value"] = cfg.psi.project_value;
  psi["input_cost_fraction"] = cfg.psi.input_cost_fraction;
  psi["benefit_factor"] = cfg.psi.benefit_factor;
  j["psi"] = std::move(psi);
  json iou;
  iou["enabled"] = cfg.iou.enabled;
  iou["issue_cap"] = cfg.iou.issue_cap;
  j["iou"] = std::move(iou);
  json commodity;
  commodity["good"] = cfg.commodity.good;
  commodity["endowment_units"] = cfg.commodity.endowment_units;
  j["commodity"] = std::move(commodity);
  return j.dump(2) + "\n";
}

}  // namespace psim
