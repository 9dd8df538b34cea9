#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "walras/allocation.hpp"
#include "walras/auction.hpp"
#include "walras/oracle.hpp"

using namespace walras;
using walras::testing::prices;

namespace {

bool clears(const MarketInstance& inst, const PriceVector& p, const std::vector<Bundle>& x) {
  if (static_cast<int>(x.size()) != inst.n()) return false;
  const DemandSnapshot snap = snapshot(inst, p);
  const DemandSets ds(inst, snap);
  Bundle total(inst.m(), 0);
  for (int i = 0; i < inst.n(); ++i) {
    if (!ds.contains(i, x[i])) return false;
    for (int j = 0; j < inst.m(); ++j) total[j] += x[i][j];
  }
  return total == inst.supply();
}

}  // namespace

TEST(DemandSets, CapacityAlongSwaps) {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  const DemandSnapshot snap = snapshot(inst, prices({"1", "2"}));
  const DemandSets ds(inst, snap);
  EXPECT_TRUE(ds.contains(0, {1, 0}));
  EXPECT_FALSE(ds.contains(0, {0, 0}));
  EXPECT_EQ(ds.capacity(0, {1, 0}, 1, 0), 1);
  EXPECT_EQ(ds.capacity(0, {1, 0}, 1, std::nullopt), 1);
  EXPECT_EQ(ds.capacity(0, {1, 1}, std::nullopt, 1), 1);
  EXPECT_EQ(ds.capacity(0, {1, 1}, 0, std::nullopt), 0);
}

// B1: demanded bundles whose total size equals s(M).
TEST(B1, CapacityAndInvalidState) {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  const DemandSnapshot snap = snapshot(inst, prices({"2", "3"}));
  const DemandSets ds(inst, snap);
  AllocationState st{{{1, 0}, {0, 1}}, AllocationState::Phase::searching};
  EXPECT_TRUE(in_b1(ds, st.x));
  EXPECT_EQ(b1_capacity(ds, st, {0, 1}, Element{0, 0}), 1);
  EXPECT_EQ(b1_capacity(ds, st, {1, 0}, Element{1, 1}), 1);
  EXPECT_EQ(b1_capacity(ds, st, {1, 0}, Element{0, 0}), 0);  // (1,1) is not demanded
  EXPECT_EQ(b1_capacity(ds, st, {0, 1}, std::nullopt), 0);
  st.x = {{1, 0}, {0, 0}};
  EXPECT_FALSE(in_b1(ds, st.x));
  EXPECT_THROW(b1_capacity(ds, st, {0, 1}, std::nullopt), InvalidInput);
}

TEST(Allocation, TwoBidderSplit) {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  const auto p = prices({"1", "2"});
  for (auto mode : {AllocationMode::capacity, AllocationMode::brute}) {
    const auto x = compute_allocation(inst, p, mode);
    EXPECT_TRUE(clears(inst, p, x));
  }
  EXPECT_THROW(compute_allocation(inst, prices({"0", "0"})), InvalidInput);
}

TEST(Allocation, RandomFrictionalInstancesLandInBruteSet) {
  std::mt19937 rng(41);
  walras::testing::GenParams g;
  g.payments = walras::testing::GenParams::Payments::frictional;
  for (int t = 0; t < 120; ++t) {
    const MarketInstance inst = walras::testing::random_instance(rng, g);
    const PriceVector p = run_auction(inst).final_price;
    const auto all = brute_equilibrium_allocations(inst, p);
    ASSERT_FALSE(all.empty());
    for (auto mode : {AllocationMode::capacity, AllocationMode::brute}) {
      const auto x = compute_allocation(inst, p, mode);
      EXPECT_TRUE(clears(inst, p, x));
      EXPECT_NE(std::find(all.begin(), all.end(), x), all.end());
    }
    const DemandSnapshot snap = snapshot(inst, p);
    EXPECT_TRUE(first_common_point(DemandSets(inst, snap)).has_value());
  }
}
