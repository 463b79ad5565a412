#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <vector>

#include "psim/agents.hpp"
#include "psim/instruments.hpp"
#include "psim/rng.hpp"

using namespace psim;

namespace {

Agent household(AgentId id, std::size_t goods) {
  Agent a;
  a.id = id;
  a.noise.assign(goods, 1.0);
  return a;
}

const std::array<double, kGroupCount> kParIndex{1.0, 1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("subjective value is the noise-weighted objective bundle value") {
  ObjectiveValues obj({3.0, 2.0});
  Agent a = household(0, 2);

  Bundle plain{{0, 2.0}};
  CHECK(subjective_value(a, obj, plain, 0) == doctest::Approx(6.0));  // noise 1 = objective

  CHECK(subjective_value(a, obj, Bundle{}, 0) == doctest::Approx(0.0));

  a.noise[0] = 1.5;
  CHECK(subjective_value(a, obj, plain, 0) == doctest::Approx(9.0));  // 2 x 3 x 1.5

  Bundle disjoint{{1, 4.0}};
  Bundle both{{0, 2.0}, {1, 4.0}};
  CHECK(subjective_value(a, obj, both, 0) ==
        doctest::Approx(subjective_value(a, obj, plain, 0) +
                        subjective_value(a, obj, disjoint, 0)));

  Bundle unknown{{7, 1.0}};
  CHECK_THROWS_AS(subjective_value(a, obj, unknown, 0), SimError);
}

TEST_CASE("equity is assets minus liabilities and may go negative") {
  ObjectiveValues obj({1.0});
  Ledger led(3, 1);
  Agent a = household(0, 1);
  a.durables[0] = 10.0;

  std::vector<double> no_debt(3, 0.0);
  CHECK(equity(a, obj, led, kParIndex, no_debt, 0) == doctest::Approx(10.0));

  // own IOUs outstanding count against the issuer
  InstrumentClass iou;
  iou.kind = InstrumentKind::Iou;
  iou.issuer = 0;
  led.issue(iou, 1, 4, 0);
  CHECK(equity(a, obj, led, kParIndex, no_debt, 0) == doctest::Approx(6.0));

  Agent broke = household(2, 1);
  std::vector<double> debt{0.0, 0.0, 5.0};
  CHECK(equity(broke, obj, led, kParIndex, debt, 0) == doctest::Approx(-5.0));

  // holdings enter deflated by their group price index
  std::array<double, kGroupCount> idx{1.0, 2.0, 1.0, 1.0};
  Agent holder = household(1, 1);
  CHECK(equity(holder, obj, led, idx, no_debt, 0) == doctest::Approx(2.0));  // 4 iou / 2
}

TEST_CASE("action rule needs strict gain and keeps the earliest best") {
  std::vector<ActionCandidate> one{{7, 5.0, 3.0}};
  auto pick = decide_action(one);
  REQUIRE(pick.has_value());
  CHECK(one[*pick].tag == 7);

  CHECK_FALSE(decide_action(std::vector<ActionCandidate>{{0, 2.0, 3.0}}).has_value());
  CHECK_FALSE(decide_action(std::vector<ActionCandidate>{{0, 3.0, 3.0}}).has_value());  // tie
  CHECK_FALSE(decide_action(std::vector<ActionCandidate>{}).has_value());

  // the earlier of two equal margins wins
  std::vector<ActionCandidate> equal{{1, 5.0, 1.0}, {2, 6.0, 2.0}};
  CHECK(equal[*decide_action(equal)].tag == 1);

  std::vector<ActionCandidate> better_second{{1, 5.0, 1.0}, {2, 9.0, 2.0}};
  CHECK(better_second[*decide_action(better_second)].tag == 2);
}

TEST_CASE("action rule never picks a candidate without strict gain") {
  Rng rng(123ull);
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<ActionCandidate> cs;
    int n = static_cast<int>(rng.bounded(6));
    for (int i = 0; i < n; ++i)
      cs.push_back({i, rng.uniform01() * 10.0, rng.uniform01() * 10.0});
    auto pick = decide_action(cs);
    if (pick) {
      CHECK(cs[*pick].interest > cs[*pick].cost);
      for (const ActionCandidate& c : cs)
        CHECK(cs[*pick].interest - cs[*pick].cost >= c.interest - c.cost);
    } else {
      for (const ActionCandidate& c : cs) CHECK(c.interest <= c.cost);
    }
  }
}

namespace {

// a ledger holding one class of every kind, issuers 0..4
struct WalletFixture {
  Ledger led{6, 1};
  ClassId psi, invoice, iou, note, credit, coin;
  WalletFixture() {
    led.set_psi_gate([](const InstrumentClass&, Count) { return true; });
    InstrumentClass c;
    c.kind = InstrumentKind::Psi;
    c.issuer = 0;
    c.spec = 0;
    psi = led.issue(c, 5, 10, 0);
    c = InstrumentClass{};
    c.kind = InstrumentKind::Invoice;
    c.issuer = 1;
    c.obligor = 2;
    invoice = led.issue(c, 5, 10, 0);
    c = InstrumentClass{};
    c.kind = InstrumentKind::Iou;
    c.issuer = 2;
    iou = led.issue(c, 5, 10, 0);
    c = InstrumentClass{};
    c.kind = InstrumentKind::FiatNote;
    c.issuer = 3;
    note = led.issue(c, 5, 10, 0);
    c = InstrumentClass{};
    c.kind = InstrumentKind::FiatCredit;
    c.issuer = 3;
    credit = led.issue(c, 5, 10, 0);
    c = InstrumentClass{};
    c.kind = InstrumentKind::CommodityMoney;
    c.backing_good = 0;
    coin = led.issue(c, 5, 10, 0);
  }
};

}  // namespace

TEST_CASE("spending order puts contractual claims first") {
  WalletFixture f;
  Agent a = household(5, 1);

  auto order = spending_order(a, {f.iou, f.psi}, f.led, RegimeKind::Psi, false);
  REQUIRE(order.size() == 2);
  CHECK(order[0] == f.psi);
  CHECK(order[1] == f.iou);

  auto solo = spending_order(a, {f.iou}, f.led, RegimeKind::Psi, false);
  CHECK(solo == std::vector<ClassId>{f.iou});

  // under a taxing fiat regime the tax currency jumps ahead of private IOUs
  auto fiat_first = spending_order(a, {f.iou, f.note}, f.led, RegimeKind::Fiat, true);
  CHECK(fiat_first[0] == f.note);
  CHECK(fiat_first[1] == f.iou);

  // without taxation money stays last
  auto money_last = spending_order(a, {f.note, f.iou}, f.led, RegimeKind::Fiat, false);
  CHECK(money_last[0] == f.iou);
  CHECK(money_last[1] == f.note);
}

TEST_CASE("spending order is a stable permutation with invoices always first") {
  WalletFixture f;
  Agent a = household(5, 1);
  std::vector<ClassId> all{f.coin, f.credit, f.iou, f.invoice, f.note, f.psi};

  Rng rng(31ull);
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<ClassId> wallet;
    for (ClassId cls : all)
      if (rng.bounded(2)) wallet.push_back(cls);
    rng.shuffle(wallet);
    bool tax_first = rng.bounded(2) == 1;
    RegimeKind regime = tax_first ? RegimeKind::Fiat : RegimeKind::Psi;
    auto order = spending_order(a, wallet, f.led, regime, tax_first);

    auto sorted_in = wallet;
    auto sorted_out = order;
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(sorted_out.begin(), sorted_out.end());
    CHECK(sorted_in == sorted_out);  // permutation

    // every invoice-kind class precedes every other kind
    auto rank0 = [&](ClassId cls) {
      InstrumentKind k = f.led.instrument(cls).kind;
      return k == InstrumentKind::Psi || k == InstrumentKind::Invoice;
    };
    bool seen_other = false;
    for (ClassId cls : order) {
      if (!rank0(cls))
        seen_other = true;
      else
        CHECK_FALSE(seen_other);
    }
    CHECK(order == spending_order(a, wallet, f.led, regime, tax_first));  // stable
  }
}

TEST_CASE("decisions see latent values only through valuation noise") {
  // scaling the latent table while dividing the noise factors by the same
  // constant leaves every subjective value, and so every decision, unchanged
  ObjectiveValues obj({4.0, 6.0});
  ObjectiveValues poisoned({8.0, 12.0});
  Agent a = household(0, 2);
  a.noise = {0.7, 1.3};
  Agent b = a;
  b.noise = {0.35, 0.65};

  Bundle bundle{{0, 3.0}, {1, 5.0}};
  CHECK(subjective_value(a, obj, bundle, 0) ==
        doctest::Approx(subjective_value(b, poisoned, bundle, 0)));
}
