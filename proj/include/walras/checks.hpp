#pragma once

// Structural properties of demand, as executable checks. Each returns a
// description of the first counterexample, or nullopt.

#include <optional>
#include <string>

#include "walras/market.hpp"

namespace walras {

// Minimal and maximal demand sets, p <= pp: both directions of the
// substitutes-and-aggregate-demand property.
std::optional<std::string> check_gs_lad(const MarketInstance& inst, const PriceVector& p,
                                        const PriceVector& pp);

// Rank and requirement monotonicity on goods whose price did not move.
std::optional<std::string> check_rank_monotonicity(const MarketInstance& inst, const PriceVector& p,
                                                   const PriceVector& pp);

// x in D_i(p) with x(X) above the requirement admits a one-unit swap out of X
// (or a removal) that stays in D_i(p). Exhaustive over buyers, bundles and X.
std::optional<std::string> check_swap_existence(const MarketInstance& inst, const PriceVector& p);

// Largest under-demand s(X) - sum of maximal ranks over all X, with its set.
std::pair<int, Mask> max_underdemand(const MarketInstance& inst, const DemandSnapshot& snap);

}  // namespace walras
