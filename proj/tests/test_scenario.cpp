#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "psim/scenario.hpp"

using namespace psim;

namespace {

struct Thrown {
  Err code;
  std::string message;
};

template <typename F>
Thrown thrown(F&& f) {
  try {
    f();
  } catch (const SimError& e) {
    return {e.code(), e.what()};
  }
  FAIL("expected a SimError");
  return {Err::ZeroAmount, ""};
}

bool mentions(const Thrown& t, const std::string& key) {
  return t.message.find(key) != std::string::npos;
}

const char* kMinimal = R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1})";

}  // namespace

TEST_CASE("a minimal file fills every default") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  CHECK(cfg.regime == RegimeKind::Psi);
  CHECK(cfg.agents == 10);
  CHECK(cfg.horizon == 100);
  CHECK(cfg.seed == 1);
  CHECK(cfg.firms == 0);
  CHECK(cfg.noise_sigma == doctest::Approx(0.25));
  CHECK(cfg.cash_target == doctest::Approx(3.0));
  CHECK(cfg.time_preference == doctest::Approx(0.9));
  CHECK(cfg.price_eta == doctest::Approx(0.1));
  CHECK(cfg.velocity_window == 50);
  CHECK(cfg.reshuffle_tick == -1);
  CHECK(cfg.goods.size() == 5);
  CHECK(cfg.goods[0].name == "grain");
  CHECK_FALSE(cfg.goods[0].durable);
  CHECK(cfg.fiat.tax_rate == doctest::Approx(0.05));
  CHECK(cfg.fiat.bank_owners == 0);
  CHECK(cfg.fiat.loan_unit == 50);
  CHECK(cfg.psi.project_value == 600);
  CHECK(cfg.psi.vote_threshold == doctest::Approx(0.5));
  CHECK(cfg.iou.enabled);
  CHECK(cfg.iou.issue_cap == 10);
  CHECK(cfg.commodity.good.empty());
}

TEST_CASE("missing required fields are named") {
  auto t = thrown([] { parse_scenario(R"({"agents": 10, "horizon": 100, "seed": 1})"); });
  CHECK(t.code == Err::MissingField);
  CHECK(mentions(t, "regime"));

  t = thrown([] { parse_scenario(R"({"regime": "psi", "horizon": 100, "seed": 1})"); });
  CHECK(t.code == Err::MissingField);
  CHECK(mentions(t, "agents"));

  t = thrown([] { parse_scenario(R"({"regime": "psi", "agents": 10, "seed": 1})"); });
  CHECK(t.code == Err::MissingField);
  CHECK(mentions(t, "horizon"));

  t = thrown([] { parse_scenario(R"({"regime": "psi", "agents": 10, "horizon": 100})"); });
  CHECK(t.code == Err::MissingField);
  CHECK(mentions(t, "seed"));
}

TEST_CASE("out-of-range values are rejected with their dotted key") {
  auto t = thrown([] {
    parse_scenario(
        R"({"regime": "fiat", "agents": 10, "horizon": 100, "seed": 1, "fiat": {"tax_rate": 1.5}})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "fiat.tax_rate"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "cash_target": -1})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "cash_target"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "fiat", "agents": 10, "horizon": 100, "seed": 1, "fiat": {"bank_owners": -1}})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "fiat.bank_owners"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "propensity_base": 0})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "propensity_base"));

  t = thrown([] {
    parse_scenario(R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "firms": 11})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "firms"));

  t = thrown([] {
    parse_scenario(R"({"regime": "gold", "agents": 10, "horizon": 100, "seed": 1})");
  });
  CHECK(t.code == Err::RangeViolation);
  CHECK(mentions(t, "gold"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "goods": []})");
  });
  CHECK(t.code == Err::RangeViolation);

  t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1,
            "commodity": {"good": "gold"}})");
  });
  CHECK(t.code == Err::InvalidConfig);
  CHECK(mentions(t, "gold"));
}

TEST_CASE("unknown keys are rejected and named, top level and nested") {
  auto t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "velocty": 3})");
  });
  CHECK(t.code == Err::UnknownKey);
  CHECK(mentions(t, "velocty"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "fiat", "agents": 10, "horizon": 100, "seed": 1, "fiat": {"weird": 1}})");
  });
  CHECK(t.code == Err::UnknownKey);
  CHECK(mentions(t, "fiat.weird"));

  t = thrown([] {
    parse_scenario(
        R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1,
            "goods": [{"name": "grain", "taste": 3}]})");
  });
  CHECK(t.code == Err::UnknownKey);
  CHECK(mentions(t, "taste"));
}

TEST_CASE("malformed json and wrong types are syntax errors") {
  CHECK(thrown([] { parse_scenario("{regime:"); }).code == Err::SyntaxError);
  CHECK(thrown([] { parse_scenario("[1, 2]"); }).code == Err::SyntaxError);
  CHECK(thrown([] {
          parse_scenario(R"({"regime": "psi", "agents": "ten", "horizon": 100, "seed": 1})");
        }).code == Err::SyntaxError);
  CHECK(thrown([] {
          parse_scenario(R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1.5})");
        }).code == Err::SyntaxError);
  CHECK(thrown([] {
          parse_scenario(
              R"({"regime": "psi", "agents": 10, "horizon": 100, "seed": 1, "fiat": 3})");
        }).code == Err::SyntaxError);
}

TEST_CASE("serialize then parse is a fixed point") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  std::string once = serialize_scenario(cfg);
  std::string twice = serialize_scenario(parse_scenario(once));
  CHECK(once == twice);

  // a fully specified config survives the loop too
  const char* full = R"({
    "regime": "fiat", "agents": 60, "horizon": 700, "seed": 42,
    "firms": 5, "noise_sigma": 0.0, "price_eta": 0.005, "cash_target": 2.5,
    "goods": [{"name": "g0", "durable": true, "cost": 1.0, "utility": 1.0}],
    "fiat": {"expansion_interval": 10, "expansion_fraction": 0.02, "loan_unit": 10,
             "bank_owners": 2, "cantillon_window": 400},
    "iou": {"enabled": false},
    "commodity": {"good": "g0", "endowment_units": 5}
  })";
  ScenarioConfig big = parse_scenario(full);
  CHECK(big.fiat.expansion_fraction == doctest::Approx(0.02));
  CHECK_FALSE(big.iou.enabled);
  CHECK(big.commodity.endowment_units == 5);
  std::string s1 = serialize_scenario(big);
  std::string s2 = serialize_scenario(parse_scenario(s1));
  CHECK(s1 == s2);
}

TEST_CASE("files load through the same strict path") {
  std::string path = "scenario_roundtrip_tmp.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << kMinimal;
  }
  ScenarioConfig cfg = load_scenario(path);
  CHECK(cfg.agents == 10);
  std::remove(path.c_str());

  CHECK(thrown([] { load_scenario("no_such_file.json"); }).code == Err::InvalidConfig);
}
