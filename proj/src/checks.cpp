#include "walras/checks.hpp"

#include <sstream>

namespace walras {

namespace {

std::string show(const Bundle& x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? "," : "") << x[j];
  os << ')';
  return os.str();
}

Mask frozen(const PriceVector& p, const PriceVector& pp) {
  Mask f = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > pp[j]) throw InvalidInput("price pair must satisfy p <= p'");
    if (p[j] == pp[j]) f |= 1u << j;
  }
  return f;
}

// Some y in to with y_j >= x_j on f (or <= when reversed) and the size condition.
bool has_partner(const Bundle& x, const std::vector<Bundle>& to, Mask f, bool forward) {
  const int m = static_cast<int>(x.size());
  for (const auto& y : to) {
    const Bundle& lo = forward ? x : y;
    const Bundle& hi = forward ? y : x;
    bool ok = sum_over(lo, full_mask(m)) >= sum_over(hi, full_mask(m));
    for (int j : elements(f)) ok = ok && lo[j] <= hi[j];
    if (ok) return true;
  }
  return false;
}

}  // namespace

std::optional<std::string> check_gs_lad(const MarketInstance& inst, const PriceVector& p,
                                        const PriceVector& pp) {
  const Mask f = frozen(p, pp);
  const DemandSnapshot a = snapshot(inst, p), b = snapshot(inst, pp);
  for (int i = 0; i < inst.n(); ++i) {
    for (int side = 0; side < 2; ++side) {
      const auto& fa = side ? a.maximal[i].bundles : a.minimal[i].bundles;
      const auto& fb = side ? b.maximal[i].bundles : b.minimal[i].bundles;
      const char* name = side ? "maximal" : "minimal";
      for (const auto& x : fa)
        if (!has_partner(x, fb, f, true))
          return "buyer " + std::to_string(i + 1) + ": " + name + " bundle " + show(x) +
                 " at p has no partner at p'";
      for (const auto& y : fb)
        if (!has_partner(y, fa, f, false))
          return "buyer " + std::to_string(i + 1) + ": " + name + " bundle " + show(y) +
                 " at p' has no partner at p";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_rank_monotonicity(const MarketInstance& inst, const PriceVector& p,
                                                   const PriceVector& pp) {
  const Mask f = frozen(p, pp);
  const Mask all = full_mask(inst.m());
  const DemandSnapshot a = snapshot(inst, p), b = snapshot(inst, pp);
  for (int i = 0; i < inst.n(); ++i) {
    for (Mask y = f;; y = (y - 1) & f) {
      const std::string at = "buyer " + std::to_string(i + 1) + ", Y mask " + std::to_string(y);
      if (a.check_rank[i].rank(y) > b.check_rank[i].rank(y)) return at + ": minimal rank decreased";
      if (a.hat_rank[i].rank(y) > b.hat_rank[i].rank(y)) return at + ": maximal rank decreased";
      if (requirement(a, i, y) > requirement(b, i, y)) return at + ": requirement on Y decreased";
      const int ra = requirement(a, i, all & ~y), rb = requirement(b, i, all & ~y);
      if (ra < rb) return at + ": requirement on the complement increased";
      if (ra == rb && (a.check_rank[i].rank(all) != b.check_rank[i].rank(all) ||
                       a.check_rank[i].rank(y) != b.check_rank[i].rank(y)))
        return at + ": equal complement requirement without equal ranks";
      if (y == 0) break;
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_swap_existence(const MarketInstance& inst, const PriceVector& p) {
  const DemandSnapshot snap = snapshot(inst, p);
  const Lattice& lat = inst.lattice();
  const int m = inst.m();
  for (int i = 0; i < inst.n(); ++i) {
    std::vector<char> in(lat.size(), 0);
    for (auto k : snap.full[i]) in[k] = 1;
    auto member = [&](const Bundle& y) {
      auto k = lat.index(y);
      return k && in[*k];
    };
    for (auto k : snap.full[i]) {
      const Bundle& x = lat.point(k);
      for (Mask s = 1; s <= full_mask(m); ++s) {
        if (sum_over(x, s) <= requirement(snap, i, s)) continue;
        bool found = false;
        for (int j : elements(s)) {
          if (x[j] == 0) continue;
          Bundle y = x;
          --y[j];
          if (member(y)) found = true;
          for (int jp = 0; jp < m && !found; ++jp) {
            if (contains(s, jp)) continue;
            Bundle z = y;
            ++z[jp];
            found = member(z);
          }
          if (found) break;
        }
        if (!found)
          return "buyer " + std::to_string(i + 1) + ": bundle " + show(x) + ", X mask " +
                 std::to_string(s) + " admits no swap";
      }
    }
  }
  return std::nullopt;
}

std::pair<int, Mask> max_underdemand(const MarketInstance& inst, const DemandSnapshot& snap) {
  std::pair<int, Mask> best{0, 0};
  for (Mask x = 1; x <= full_mask(inst.m()); ++x) {
    const int u = -underdemand(inst, snap, x);
    if (u > best.first) best = {u, x};
  }
  return best;
}

}  // namespace walras
