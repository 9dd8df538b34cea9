#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "walras/exactnum.hpp"

namespace walras {

using Mask = std::uint32_t;
using Bundle = std::vector<int>;

inline constexpr int kMaxGoods = 16;

inline Mask full_mask(int m) { return m == 0 ? 0u : (m >= 32 ? ~0u : ((1u << m) - 1)); }
inline bool contains(Mask s, int j) { return (s >> j) & 1u; }
inline bool is_subset(Mask a, Mask b) { return (a & ~b) == 0; }
int popcount(Mask s);
std::vector<int> elements(Mask s);
// x(S) for an integer vector indexed by good.
int sum_over(const Bundle& x, Mask s);

// Integer polymatroid rank function over goods {0..m-1}; only subsets of
// `ground` are meaningful and other elements are treated as absent:
// rank(S) == rank(S & ground).
class RankOracle {
 public:
  RankOracle() = default;

  // Checks normalization, monotonicity and submodularity exhaustively.
  static RankOracle from_function(int m, Mask ground, const std::function<int(Mask)>& f,
                                  bool validate = true);
  static RankOracle zero(int m, Mask ground = 0);
  // rank(S) = sum of caps over S.
  static RankOracle modular(int m, const Bundle& caps, Mask ground);

  int universe() const { return m_; }
  Mask ground() const { return ground_; }
  int rank(Mask s) const { return table_[s & ground_]; }
  int operator()(Mask s) const { return rank(s); }

  bool operator==(const RankOracle& o) const;

 private:
  int m_ = 0;
  Mask ground_ = 0;
  std::vector<int> table_{0};  // indexed by every subset of the universe
};

RankOracle restrict(const RankOracle& r, Mask s);
RankOracle contract(const RankOracle& r, Mask x);
RankOracle direct_sum(const RankOracle& r1, const RankOracle& r2);

struct GreedyResult {
  LexScalar value;
  // Rank function of the optimal face. On `poly_part` (zero-weight
  // elements when optimizing over P) the face is the polymatroid of this
  // rank; elsewhere it is the base polyhedron.
  RankOracle face;
  Mask poly_part = 0;
  Bundle point;  // one optimal point
};

// Maximizes sum_j w_j x_j over B(r) or P(r); w is indexed by good.
GreedyResult greedy_max(const RankOracle& r, const std::vector<LexScalar>& w, bool over_base);

bool in_polymatroid(const RankOracle& r, const Bundle& x);
bool in_base(const RankOracle& r, const Bundle& x);

// min{ r(S) - x(S) : e in S, f not in S }; f = nullopt gives saturation capacity.
int exchange_capacity(const RankOracle& r, const Bundle& x, int e, std::optional<int> f);

// All integer points of P(r) (or B(r)); desk-scale enumeration.
std::vector<Bundle> lattice_points(const RankOracle& r, bool base_only);

// Rank function of an M-convex family: rank(S) = max x(S).
RankOracle rank_of_family(int m, const std::vector<Bundle>& family);
bool is_m_convex(const std::vector<Bundle>& family);

}  // namespace walras
