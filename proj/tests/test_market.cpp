#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "walras/market.hpp"

using namespace walras;
using walras::testing::prices;

TEST(Payment, BreakpointsAndSlopes) {
  const auto q = PiecewisePayment::from_breakpoints({{Rat(0), Rat(0)}, {Rat(1), Rat(1, 2)}}, Rat(2));
  EXPECT_EQ(q.at(Rat(1, 2)), Rat(1, 4));
  EXPECT_EQ(q.at(Rat(3)), Rat(9, 2));
  EXPECT_EQ(q.right_slope(Rat(0)), Rat(1, 2));
  EXPECT_EQ(q.right_slope(Rat(1)), Rat(2));
  EXPECT_EQ(q.next_breakpoint(Rat(0)), Rat(1));
  EXPECT_FALSE(q.next_breakpoint(Rat(1)).has_value());
  EXPECT_EQ(q.interior_breakpoints(), 1);
  EXPECT_THROW(q.at(Rat(-1)), InvalidInput);
}

TEST(Payment, RejectsBadShapes) {
  EXPECT_THROW(PiecewisePayment::from_breakpoints({{Rat(1), Rat(0)}}, Rat(1)), InvalidInput);
  EXPECT_THROW(PiecewisePayment::from_breakpoints({{Rat(0), Rat(0)}, {Rat(1), Rat(0)}}, Rat(1)),
               InvalidInput);
  EXPECT_THROW(PiecewisePayment::linear(Rat(0)), InvalidInput);
}

TEST(Valuation, AcceptsAssignmentValuations) {
  std::mt19937 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Bundle cap = walras::testing::random_supply(rng, 3, 5);
    EXPECT_NO_THROW(walras::testing::random_valuation(rng, cap, 10));
  }
}

TEST(Valuation, RejectsComplements) {
  try {
    Valuation::from_bundles({1, 1}, {{{0, 0}, Rat(0)}, {{1, 0}, Rat(1)}, {{0, 1}, Rat(1)}, {{1, 1}, Rat(3)}});
    FAIL() << "complementary valuation accepted";
  } catch (const ValuationError& e) {
    ASSERT_TRUE(e.witness.has_value());
  }
  EXPECT_THROW(Valuation::from_bundles({1}, {{{0}, Rat(1)}, {{1}, Rat(2)}}), ValuationError);
  EXPECT_THROW(Valuation::from_bundles({1}, {{{0}, Rat(0)}, {{1}, Rat(-1)}}), ValuationError);
}

// Above the pairwise threshold the check is local; a single bump breaks it.
TEST(Valuation, LocalCheckOnLargeBoxes) {
  const Bundle cap{12, 12, 15};
  Valuation v = Valuation::additive(cap, {Rat(1), Rat(1), Rat(1)});
  std::vector<Rat> vals;
  for (std::size_t k = 0; k < v.size(); ++k) vals.push_back(v.at_index(k));
  EXPECT_FALSE(find_mnatural_violation(v.lattice(), vals).has_value());
  vals[*v.lattice().index({6, 6, 7})] += Rat(1, 2);
  EXPECT_TRUE(find_mnatural_violation(v.lattice(), vals).has_value());
}

TEST(Market, Validation) {
  const Bundle s{1, 1};
  auto buyer = walras::testing::idle_buyer(s);
  EXPECT_THROW(MarketInstance(s, {buyer}), InvalidInput);
  EXPECT_THROW(MarketInstance(Bundle{}, {}), InvalidInput);
  auto short_pay = buyer;
  short_pay.payments.pop_back();
  EXPECT_THROW(MarketInstance(s, {buyer, short_pay}), InvalidInput);
  const MarketInstance ok(s, {buyer, buyer});
  EXPECT_THROW(snapshot(ok, prices({"1"})), InvalidInput);
  EXPECT_THROW(snapshot(ok, prices({"-1", "0"})), InvalidInput);
}

TEST(Demand, MinimalAndMaximalFamilies) {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  const auto p = prices({"1", "2"});
  const auto full = demand(inst, 0, p, DemandKind::full).bundles;
  EXPECT_EQ(full.size(), 3u);  // every nonempty bundle has utility 1
  EXPECT_EQ(demand(inst, 0, p, DemandKind::minimal).bundles, (std::vector<Bundle>{{1, 0}, {0, 1}}));
  EXPECT_EQ(demand(inst, 0, p, DemandKind::maximal).bundles, (std::vector<Bundle>{{1, 1}}));
  EXPECT_EQ(demand(inst, 0, prices({"0", "0"}), DemandKind::minimal).bundles,
            (std::vector<Bundle>{{1, 1}}));
}

// Requirement, over-demand and X* against direct enumeration.
TEST(Demand, SetFunctionsMatchEnumeration) {
  std::mt19937 rng(21);
  walras::testing::GenParams g;
  g.payments = walras::testing::GenParams::Payments::frictional;
  for (int t = 0; t < 150; ++t) {
    const MarketInstance inst = walras::testing::random_instance(rng, g);
    PriceVector p(inst.m());
    for (auto& x : p) x = rat(walras::testing::uniform(rng, 0, 12), 2);
    const DemandSnapshot snap = snapshot(inst, p);
    const Mask all = full_mask(inst.m());
    int best = 0;
    bool short_somewhere = false;
    std::vector<Mask> maximizers;
    for (Mask x = 0; x <= all; ++x) {
      int need = 0, ceiling = 0;
      for (int i = 0; i < inst.n(); ++i) {
        int lo = 1 << 20, hi = 0;
        for (auto k : snap.full[i]) {
          lo = std::min(lo, sum_over(inst.lattice().point(k), x));
          hi = std::max(hi, sum_over(inst.lattice().point(k), x));
        }
        EXPECT_EQ(requirement(snap, i, x), lo);
        need += lo;
        ceiling += hi;
      }
      const int o = need - sum_over(inst.supply(), x);
      EXPECT_EQ(overdemand(inst, snap, x), o);
      EXPECT_EQ(underdemand(inst, snap, x), ceiling - sum_over(inst.supply(), x));
      short_somewhere = short_somewhere || ceiling < sum_over(inst.supply(), x);
      if (o > best) {
        best = o;
        maximizers.clear();
      }
      if (o == best) maximizers.push_back(x);
    }
    Mask meet = all;
    for (Mask x : maximizers) meet &= x;
    const Mask expect = best > 0 ? meet : 0;
    EXPECT_EQ(minimal_overdemanded_set(inst, p), expect);
    EXPECT_EQ(is_equilibrium_price(inst, snap).ok, best == 0 && !short_somewhere);
  }
}

TEST(Demand, TwoBidderEquilibrium) {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  EXPECT_FALSE(is_equilibrium_price(inst, prices({"0", "0"})).ok);
  EXPECT_TRUE(is_equilibrium_price(inst, prices({"1", "2"})).ok);
  const auto high = is_equilibrium_price(inst, prices({"3", "3"}));
  EXPECT_FALSE(high.ok);
  EXPECT_EQ(high.failed, EquilibriumCheck::Failure::underdemanded);
}
