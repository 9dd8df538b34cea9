#include "walras/polymatroid.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <string>

namespace walras {

int popcount(Mask s) { return std::popcount(s); }

std::vector<int> elements(Mask s) {
  std::vector<int> out;
  for (int j = 0; s >> j; ++j)
    if (contains(s, j)) out.push_back(j);
  return out;
}

int sum_over(const Bundle& x, Mask s) {
  int t = 0;
  for (int j = 0; j < static_cast<int>(x.size()); ++j)
    if (contains(s, j)) t += x[j];
  return t;
}

RankOracle RankOracle::from_function(int m, Mask ground, const std::function<int(Mask)>& f,
                                     bool validate) {
  if (m < 0 || m > kMaxGoods) throw InvalidInput("rank oracle supports at most 16 goods");
  if (!is_subset(ground, full_mask(m))) throw InvalidInput("ground set outside universe");
  RankOracle r;
  r.m_ = m;
  r.ground_ = ground;
  r.table_.assign(std::size_t{1} << m, 0);
  // Fill submasks of ground, then copy to the rest.
  for (Mask s = ground;; s = (s - 1) & ground) {
    r.table_[s] = f(s);
    if (s == 0) break;
  }
  for (Mask s = 0; s < r.table_.size(); ++s) r.table_[s] = r.table_[s & ground];
  if (!validate) return r;

  if (r.table_[0] != 0) throw InvalidInput("rank function not normalized");
  const auto g = elements(ground);
  for (Mask s = ground;; s = (s - 1) & ground) {
    for (int e : g) {
      if (contains(s, e)) continue;
      int de = r.rank(s | (1u << e)) - r.rank(s);
      if (de < 0) throw InvalidInput("rank function not monotone at S=" + std::to_string(s));
      for (int f : g) {
        if (f == e || contains(s, f)) continue;
        int de2 = r.rank(s | (1u << e) | (1u << f)) - r.rank(s | (1u << f));
        if (de2 > de)
          throw InvalidInput("rank function not submodular at S=" + std::to_string(s));
      }
    }
    if (s == 0) break;
  }
  return r;
}

RankOracle RankOracle::zero(int m, Mask ground) {
  return from_function(m, ground, [](Mask) { return 0; }, false);
}

RankOracle RankOracle::modular(int m, const Bundle& caps, Mask ground) {
  for (int j : elements(ground))
    if (caps.at(j) < 0) throw InvalidInput("negative capacity");
  return from_function(m, ground, [&](Mask s) { return sum_over(caps, s); }, false);
}

bool RankOracle::operator==(const RankOracle& o) const {
  if (m_ != o.m_ || ground_ != o.ground_) return false;
  for (Mask s = ground_;; s = (s - 1) & ground_) {
    if (rank(s) != o.rank(s)) return false;
    if (s == 0) break;
  }
  return true;
}

RankOracle restrict(const RankOracle& r, Mask s) {
  if (!is_subset(s, r.ground())) throw InvalidInput("restriction set not inside ground");
  return RankOracle::from_function(r.universe(), s, [&](Mask t) { return r.rank(t); }, false);
}

RankOracle contract(const RankOracle& r, Mask x) {
  if (!is_subset(x, r.ground())) throw InvalidInput("contraction set not inside ground");
  const int rx = r.rank(x);
  return RankOracle::from_function(
      r.universe(), r.ground() & ~x, [&](Mask t) { return r.rank(t | x) - rx; }, false);
}

RankOracle direct_sum(const RankOracle& r1, const RankOracle& r2) {
  if (r1.universe() != r2.universe()) throw InvalidInput("direct sum over different universes");
  if (r1.ground() & r2.ground()) throw InvalidInput("direct sum of overlapping grounds");
  return RankOracle::from_function(
      r1.universe(), r1.ground() | r2.ground(),
      [&](Mask t) { return r1.rank(t) + r2.rank(t); }, false);
}

GreedyResult greedy_max(const RankOracle& r, const std::vector<LexScalar>& w, bool over_base) {
  const int m = r.universe();
  if (static_cast<int>(w.size()) != m) throw InvalidInput("weight vector size mismatch");
  std::vector<int> considered;
  Mask zero_class = 0;
  for (int e : elements(r.ground())) {
    if (!over_base && w[e] < LexScalar::zero()) continue;
    if (!over_base && w[e] == LexScalar::zero()) zero_class |= 1u << e;
    considered.push_back(e);
  }
  std::vector<LexScalar> levels;
  for (int e : considered) levels.push_back(w[e]);
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  GreedyResult out;
  out.point.assign(m, 0);
  out.poly_part = zero_class;
  std::vector<std::pair<Mask, Mask>> parts;  // (class, prefix before it)
  Mask prefix = 0;
  for (const auto& lv : levels) {
    Mask cls = 0;
    for (int e : considered)
      if (w[e] == lv) cls |= 1u << e;
    const int gain = r.rank(prefix | cls) - r.rank(prefix);
    out.value += lv.scaled(gain);
    Mask run = prefix;
    for (int e : elements(cls)) {
      out.point[e] = r.rank(run | (1u << e)) - r.rank(run);
      run |= 1u << e;
    }
    parts.emplace_back(cls, prefix);
    prefix |= cls;
  }
  out.face = RankOracle::from_function(
      m, r.ground(),
      [&](Mask t) {
        int v = 0;
        for (auto [cls, pre] : parts) v += r.rank((t & cls) | pre) - r.rank(pre);
        return v;
      },
      false);
  return out;
}

bool in_polymatroid(const RankOracle& r, const Bundle& x) {
  const Mask g = r.ground();
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    if (x[j] < 0) return false;
    if (x[j] > 0 && !contains(g, j)) return false;
  }
  for (Mask s = g;; s = (s - 1) & g) {
    if (sum_over(x, s) > r.rank(s)) return false;
    if (s == 0) break;
  }
  return true;
}

bool in_base(const RankOracle& r, const Bundle& x) {
  return in_polymatroid(r, x) && sum_over(x, r.ground()) == r.rank(r.ground());
}

int exchange_capacity(const RankOracle& r, const Bundle& x, int e, std::optional<int> f) {
  if (!in_polymatroid(r, x)) throw InvalidInput("exchange capacity: point outside polymatroid");
  if (f && *f == e) throw InvalidInput("exchange capacity: e == f");
  const Mask g = r.ground();
  if (!contains(g, e)) return 0;
  int best = -1;
  for (Mask s = g;; s = (s - 1) & g) {
    if (contains(s, e) && !(f && contains(s, *f))) {
      int v = r.rank(s) - sum_over(x, s);
      if (best < 0 || v < best) best = v;
    }
    if (s == 0) break;
  }
  if (f) best = std::min(best, x.at(*f));
  return best;
}

std::vector<Bundle> lattice_points(const RankOracle& r, bool base_only) {
  const int m = r.universe();
  Bundle cap(m, 0);
  for (int j : elements(r.ground())) cap[j] = r.rank(1u << j);
  std::vector<Bundle> out;
  Bundle x(m, 0);
  while (true) {
    if (base_only ? in_base(r, x) : in_polymatroid(r, x)) out.push_back(x);
    int j = 0;
    while (j < m && x[j] == cap[j]) x[j++] = 0;
    if (j == m) break;
    ++x[j];
  }
  return out;
}

RankOracle rank_of_family(int m, const std::vector<Bundle>& family) {
  if (family.empty()) throw InvalidInput("rank of an empty family");
  return RankOracle::from_function(m, full_mask(m), [&](Mask s) {
    int best = 0;
    for (const auto& x : family) best = std::max(best, sum_over(x, s));
    return best;
  });
}

bool is_m_convex(const std::vector<Bundle>& family) {
  std::set<Bundle> fam(family.begin(), family.end());
  for (const auto& x : fam) {
    for (const auto& y : fam) {
      const int m = static_cast<int>(x.size());
      for (int i = 0; i < m; ++i) {
        if (x[i] <= y[i]) continue;
        bool ok = false;
        for (int j = 0; j < m && !ok; ++j) {
          if (x[j] >= y[j]) continue;
          Bundle a = x, b = y;
          --a[i];
          ++a[j];
          ++b[i];
          --b[j];
          ok = fam.count(a) && fam.count(b);
        }
        if (!ok) return false;
      }
    }
  }
  return true;
}

}  // namespace walras
