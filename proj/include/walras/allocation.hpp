#pragma once

#include <optional>
#include <vector>

#include "walras/market.hpp"

namespace walras {

// Membership in D_i(p) by lattice index.
class DemandSets {
 public:
  DemandSets(const MarketInstance& inst, const DemandSnapshot& snap);

  bool contains(int i, const Bundle& x) const;
  // max alpha with x + alpha*(chi_j - chi_jp) in D_i(p); either index may be absent.
  int capacity(int i, const Bundle& x, std::optional<int> j, std::optional<int> jp) const;
  const DemandSnapshot& snap() const { return *snap_; }
  const MarketInstance& instance() const { return *inst_; }

 private:
  const MarketInstance* inst_;
  const DemandSnapshot* snap_;
  std::vector<std::vector<char>> member_;
};

struct Element {
  int buyer = 0;
  int good = 0;
};

struct AllocationState {
  enum class Phase { searching, done };
  std::vector<Bundle> x;
  Phase phase = Phase::searching;
};

bool in_b1(const DemandSets& ds, const std::vector<Bundle>& x);

// max alpha with x + alpha*(chi_e - chi_f) in B1. Throws InvalidInput when x is not in B1.
int b1_capacity(const DemandSets& ds, const AllocationState& state, Element e,
                std::optional<Element> f);

enum class AllocationMode { capacity, brute, automatic };

// Brute force applies when prod_j (s_j + 1)^n is at most this.
inline constexpr double kBruteAllocationLimit = 1e6;

std::vector<Bundle> compute_allocation(const MarketInstance& inst, const PriceVector& p,
                                       AllocationMode mode = AllocationMode::automatic);

// First tuple x_i in D_i(p) with sum x_i = s, depth-first; nullopt if none.
std::optional<std::vector<Bundle>> first_common_point(const DemandSets& ds);

}  // namespace walras
