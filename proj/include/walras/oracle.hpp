#pragma once

#include <cstddef>
#include <vector>

#include "walras/exactnum.hpp"
#include "walras/market.hpp"
#include "walras/polymatroid.hpp"

namespace walras {

// Brute-force referees. They refuse (BudgetExceeded) rather than degrade.
struct OracleBudget {
  std::size_t max_lattice_points = 200000;
  std::size_t max_subsets = std::size_t{1} << 16;
  std::size_t max_tuples = 5000000;
};

// Frictionless, integer-valued instances only. Equilibrium is tested by
// searching for a clearing allocation, not by the set-function criterion.
PriceVector brute_minimum_equilibrium_frictionless(const MarketInstance& inst,
                                                   const OracleBudget& budget = {});

// Every integer price at which a clearing allocation exists, on [0, vmax]^M.
std::vector<PriceVector> brute_equilibrium_grid(const MarketInstance& inst,
                                                const OracleBudget& budget = {});

struct P2Optimum {
  LexScalar value;
  std::vector<std::vector<Bundle>> argset;
};

P2Optimum brute_p2_optimum(const std::vector<RankOracle>& ranks, const Bundle& supply,
                           const std::vector<std::vector<LexScalar>>& w,
                           const OracleBudget& budget = {});

std::vector<std::vector<Bundle>> brute_equilibrium_allocations(const MarketInstance& inst,
                                                               const PriceVector& p,
                                                               const OracleBudget& budget = {});

}  // namespace walras
