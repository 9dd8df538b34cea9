#pragma once

#include <optional>
#include <vector>

#include "walras/exactnum.hpp"
#include "walras/market.hpp"
#include "walras/polymatroid.hpp"

namespace walras {

// What the direction computation sees of the market at one price: the
// minimal-demand rank functions, the supply and the right slopes.
struct DirectionInput {
  int m = 0;
  Bundle supply;
  std::vector<RankOracle> ranks;
  std::vector<std::vector<Rat>> slopes;
};

DirectionInput direction_input(const MarketInstance& inst, const DemandSnapshot& snap);

using LexWeightMatrix = std::vector<std::vector<LexScalar>>;

LexWeightMatrix build_weights(const std::vector<std::vector<Rat>>& slopes);
LexWeightMatrix build_weights(const MarketInstance& inst, const PriceVector& p);

struct PolymatroidSumSolution {
  std::vector<Bundle> x;
  LexScalar value;
  Bundle slack;
};

// Lexicographic max of sum w_ij x_ij with x_i in P(rank_i), sum x_i <= s.
PolymatroidSumSolution solve_polymatroid_sum(const std::vector<RankOracle>& ranks,
                                             const Bundle& supply, const LexWeightMatrix& w);

struct ExchangeGraph {
  struct Copy {
    int owner = 0;
    int good = 0;
  };
  std::vector<Copy> copies;
  std::vector<Bundle> extended;               // x' with x'_i in the base of rank_i
  std::vector<std::pair<int, int>> backward;  // (good, copy)
  Mask oversold = 0;
};

ExchangeGraph build_exchange_graph(const std::vector<RankOracle>& ranks, const Bundle& supply,
                                   const PolymatroidSumSolution& sol);
Mask xstar_by_reachability(const ExchangeGraph& g);

struct DualSolution {
  Mask xstar = 0;
  std::vector<LexScalar> z;  // indexed by good; zero off xstar
};

DualSolution solve_virtual_assignment(const ExchangeGraph& g, Mask xstar, const LexWeightMatrix& w,
                                      const Bundle& supply);

// Least dual optimum on every good, read off complementary slackness with
// an optimal primal solution. Used to cross-check the assignment route and
// to evaluate the dual objective at a true optimum.
std::vector<LexScalar> minimal_dual_full(const std::vector<RankOracle>& ranks, const Bundle& supply,
                                         const LexWeightMatrix& w, const PolymatroidSumSolution& sol);

struct Direction {
  std::vector<Rat> d;
  Mask support = 0;
  bool operator==(const Direction& o) const { return d == o.d && support == o.support; }
};

Direction extract_direction(const DualSolution& z);
Direction zero_direction(int m);

// Minimal demand family at p + eps*d for small eps, as a rank function.
RankOracle perturbed_minimal_demand(const RankOracle& rank, Mask xstar, const std::vector<Rat>& costs);
std::vector<RankOracle> perturbed_ranks(const DirectionInput& in, Mask xstar, const Direction& d);

struct Certificate {
  bool ok = true;
  Mask witness = 0;  // the perturbed minimal minimizer when it is not X*
};

Certificate lsc_certificate(const std::vector<RankOracle>& perturbed, Mask xstar, const Bundle& supply);
Certificate lsc_certificate(const DirectionInput& in, Mask xstar, const Direction& d);

// Rows of s(X) + rank(X* \ X) under the perturbed ranks, X ranging over
// subsets of X* in increasing mask order.
struct PerturbedTable {
  std::vector<Mask> subsets;
  std::vector<std::vector<int>> buyer_rows;
  std::vector<int> objective;
};
PerturbedTable perturbed_table(const std::vector<RankOracle>& perturbed, Mask xstar,
                               const Bundle& supply);

struct SlopeFactorization {
  std::vector<Rat> alpha;  // alpha[0] == 1
  std::vector<Rat> beta;
};
// Rank-one factorization slopes[i][j] = alpha_i * beta_j, if one exists.
std::optional<SlopeFactorization> factor_slopes(const std::vector<std::vector<Rat>>& slopes);

// d_j = 1 / beta_j on xstar. Throws NotSeparable without a factorization.
Direction separable_direction(const std::vector<std::vector<Rat>>& slopes, Mask xstar);
Direction separable_direction(const std::vector<Rat>& beta, Mask xstar);

LexScalar eval_dual_objective(const std::vector<RankOracle>& ranks, const Bundle& supply,
                              const LexWeightMatrix& w, const std::vector<LexScalar>& z);

// Returns a nonempty X subset of xstar at which lowering z by a small
// gamma-tier amount does not strictly raise the objective, if any.
std::optional<Mask> dual_minimality_violation(const std::vector<RankOracle>& ranks,
                                              const Bundle& supply, const LexWeightMatrix& w,
                                              const std::vector<LexScalar>& z, Mask xstar);

struct DirectionResult {
  Mask xstar = 0;
  LexWeightMatrix w;
  PolymatroidSumSolution primal;
  ExchangeGraph graph;
  DualSolution dual;
  std::vector<LexScalar> z_full;
  Direction direction;
  LexScalar dual_value;
};

// The full pipeline with its internal cross-checks; any disagreement
// between routes raises InternalError.
DirectionResult compute_direction(const DirectionInput& in);

}  // namespace walras
