#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "walras/market.hpp"

namespace walras {

// q'_ij(p_j) = alpha_i * beta_j(p_j), with beta_j piecewise constant.
struct SeparableFrictions {
  std::vector<Rat> alpha;
  // Per good: (start price, value) steps in increasing start order, first start 0.
  std::vector<std::vector<std::pair<Rat, Rat>>> beta;

  Rat beta_at(int j, const Rat& p) const;
  std::vector<Rat> beta_vector(const PriceVector& p) const;
  bool price_independent() const;

  static SeparableFrictions constant(std::vector<Rat> alpha, const std::vector<Rat>& beta);
};

std::optional<SeparableFrictions> detect_separable(const MarketInstance& inst);

// Identity payments only; WrongMode otherwise.
Rat eval_lyapunov(const MarketInstance& inst, const PriceVector& p);
// WrongMode if the frictions do not reproduce the instance slopes at p.
Rat eval_scaled_lyapunov(const MarketInstance& inst, const SeparableFrictions& fr, const PriceVector& p);

// One-sided derivative of the scaled potential along (1/beta) on X.
Rat directional_derivative(const MarketInstance& inst, const SeparableFrictions& fr,
                           const PriceVector& p, Mask x);

struct TranslationSums {
  Rat original;  // L(p) + L(p')
  Rat shifted;   // L((p - lambda tau) v p') + L(p ^ (p' + lambda tau))
  bool holds() const { return original >= shifted; }
};

// tau defaults to 1/beta. beta must be constant over the prices involved.
TranslationSums translation_sums(const MarketInstance& inst, const SeparableFrictions& fr,
                                 const PriceVector& p, const PriceVector& pp, const Rat& lambda,
                                 std::optional<std::vector<Rat>> tau = std::nullopt);
bool check_translation_submodularity(const MarketInstance& inst, const SeparableFrictions& fr,
                                     const PriceVector& p, const PriceVector& pp, const Rat& lambda,
                                     std::optional<std::vector<Rat>> tau = std::nullopt);

}  // namespace walras
