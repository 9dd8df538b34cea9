#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "walras/exactnum.hpp"
#include "walras/polymatroid.hpp"

namespace walras {

using PriceVector = std::vector<Rat>;

inline constexpr std::size_t kMaxLatticePoints = 200000;

// Continuous, strictly increasing, piecewise-linear payment with q(0) = 0.
class PiecewisePayment {
 public:
  PiecewisePayment() : PiecewisePayment(identity()) {}

  static PiecewisePayment identity();
  static PiecewisePayment linear(const Rat& slope);
  // breakpoints[0] must be (0, 0); tail_slope applies after the last one.
  static PiecewisePayment from_breakpoints(std::vector<std::pair<Rat, Rat>> breakpoints,
                                           Rat tail_slope);

  Rat at(const Rat& price) const;
  // Slope of the segment to the right of price.
  Rat right_slope(const Rat& price) const;
  // Smallest breakpoint price strictly greater than price.
  std::optional<Rat> next_breakpoint(const Rat& price) const;

  const std::vector<std::pair<Rat, Rat>>& breakpoints() const { return bp_; }
  const Rat& tail_slope() const { return tail_; }
  int interior_breakpoints() const { return static_cast<int>(bp_.size()) - 1; }

  bool operator==(const PiecewisePayment& o) const { return bp_ == o.bp_ && tail_ == o.tail_; }

 private:
  PiecewisePayment(std::vector<std::pair<Rat, Rat>> bp, Rat tail, int);

  std::vector<std::pair<Rat, Rat>> bp_;
  Rat tail_;
};

Rat payment_at(const PiecewisePayment& q, const Rat& price);
Rat right_slope(const PiecewisePayment& q, const Rat& price);

// Mixed-radix enumeration of the box [0, cap].
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(Bundle cap);

  const Bundle& cap() const { return cap_; }
  std::size_t size() const { return points_.size(); }
  const Bundle& point(std::size_t idx) const { return points_[idx]; }
  const std::vector<Bundle>& points() const { return points_; }
  std::optional<std::size_t> index(const Bundle& x) const;
  bool in_box(const Bundle& x) const { return index(x).has_value(); }

 private:
  Bundle cap_;
  std::vector<std::size_t> stride_;
  std::vector<Bundle> points_;
};

struct MnaturalWitness {
  Bundle x, y;
  int j = 0;
  std::string describe() const;
};

// Raised when a valuation fails normalization, monotonicity or the
// M-natural exchange axiom.
struct ValuationError : InvalidInput {
  ValuationError(const std::string& msg, std::optional<MnaturalWitness> w)
      : InvalidInput(msg), witness(std::move(w)) {}
  std::optional<MnaturalWitness> witness;
};

class Valuation {
 public:
  Valuation() = default;
  // values[k] is v(lattice.point(k)). Validated on construction.
  Valuation(Bundle cap, std::vector<Rat> values);

  static Valuation from_bundles(const Bundle& cap, const std::vector<std::pair<Bundle, Rat>>& t);
  static Valuation additive(const Bundle& cap, const std::vector<Rat>& per_unit);
  // v(x) = max{a_j : x_j > 0}.
  static Valuation unit_demand(const Bundle& cap, const std::vector<Rat>& a);

  const Bundle& cap() const { return lattice_.cap(); }
  const Lattice& lattice() const { return lattice_; }
  std::size_t size() const { return values_.size(); }
  const Rat& at_index(std::size_t k) const { return values_[k]; }
  const Rat& at(const Bundle& x) const;

  bool operator==(const Valuation& o) const { return cap() == o.cap() && values_ == o.values_; }

 private:
  Lattice lattice_;
  std::vector<Rat> values_;
};

// Pairwise exchange check for small tables, a local check otherwise.
std::optional<MnaturalWitness> find_mnatural_violation(const Lattice& lat,
                                                       const std::vector<Rat>& values);

struct Buyer {
  Valuation valuation;
  std::vector<PiecewisePayment> payments;
  bool operator==(const Buyer& o) const {
    return valuation == o.valuation && payments == o.payments;
  }
};

class MarketInstance {
 public:
  MarketInstance() = default;
  MarketInstance(Bundle supply, std::vector<Buyer> buyers);

  int m() const { return static_cast<int>(supply_.size()); }
  int n() const { return static_cast<int>(buyers_.size()); }
  const Bundle& supply() const { return supply_; }
  const Buyer& buyer(int i) const { return buyers_.at(i); }
  const std::vector<Buyer>& buyers() const { return buyers_; }
  const Lattice& lattice() const { return buyers_.front().valuation.lattice(); }
  int total_supply() const;
  int total_breakpoints() const;
  bool frictionless() const;

  bool operator==(const MarketInstance& o) const {
    return supply_ == o.supply_ && buyers_ == o.buyers_;
  }

 private:
  Bundle supply_;
  std::vector<Buyer> buyers_;
};

enum class DemandKind { full, minimal, maximal };

struct DemandFamily {
  std::vector<Bundle> bundles;
  DemandKind kind = DemandKind::full;
};

Rat utility(const MarketInstance& inst, int i, const Bundle& x, const PriceVector& p);
DemandFamily demand(const MarketInstance& inst, int i, const PriceVector& p, DemandKind kind);
// Family must be minimal or maximal kind and M-convex.
RankOracle rank_of_demand(const DemandFamily& family, int m);

// Everything the solver needs about the market at one price.
struct DemandSnapshot {
  PriceVector price;
  std::vector<std::vector<std::size_t>> full;  // lattice indices of D_i(p)
  std::vector<DemandFamily> minimal, maximal;
  std::vector<Rat> best_utility;
  std::vector<RankOracle> check_rank, hat_rank;
  std::vector<std::vector<Rat>> slopes;  // slopes[i][j] = q'_ij(p_j)
};

DemandSnapshot snapshot(const MarketInstance& inst, const PriceVector& p);
void validate_price(const MarketInstance& inst, const PriceVector& p);

int requirement(const DemandSnapshot& snap, int i, Mask x);
int requirement(const MarketInstance& inst, int i, Mask x, const PriceVector& p);
int overdemand(const MarketInstance& inst, const DemandSnapshot& snap, Mask x);
int overdemand(const MarketInstance& inst, Mask x, const PriceVector& p);
int underdemand(const MarketInstance& inst, const DemandSnapshot& snap, Mask x);
int underdemand(const MarketInstance& inst, Mask x, const PriceVector& p);

// Intersection of all minimizers of s(X) + sum_i rank_i(M \ X).
Mask minimal_minimizer(const std::vector<RankOracle>& ranks, const Bundle& supply);
Mask minimal_overdemanded_set(const MarketInstance& inst, const PriceVector& p);

struct EquilibriumCheck {
  enum class Failure { none, overdemanded, underdemanded };
  bool ok = true;
  Mask witness = 0;
  Failure failed = Failure::none;
};

EquilibriumCheck is_equilibrium_price(const MarketInstance& inst, const DemandSnapshot& snap);
EquilibriumCheck is_equilibrium_price(const MarketInstance& inst, const PriceVector& p);

}  // namespace walras
