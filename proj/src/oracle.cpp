#include "walras/oracle.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace walras {

namespace {

void refuse(const std::string& what, std::size_t need, std::size_t limit) {
  throw BudgetExceeded(what + " budget exceeded: needs " + std::to_string(need) + ", limit " +
                       std::to_string(limit));
}

void check_lattice(const MarketInstance& inst, const OracleBudget& b) {
  if (inst.lattice().size() > b.max_lattice_points)
    refuse("max_lattice_points", inst.lattice().size(), b.max_lattice_points);
}

// Depth-first search over tuples x_i in fam[i] summing to target.
// visit returns false to stop early. Counts visited nodes against the budget.
void enumerate_tuples(const std::vector<std::vector<Bundle>>& fam, const Bundle& target,
                      const OracleBudget& b,
                      const std::function<bool(const std::vector<Bundle>&)>& visit) {
  const int n = static_cast<int>(fam.size());
  const int m = static_cast<int>(target.size());
  std::size_t nodes = 0;
  std::vector<Bundle> cur;
  Bundle left = target;
  bool stop = false;
  std::function<void(int)> rec = [&](int i) {
    if (stop) return;
    if (++nodes > b.max_tuples) refuse("max_tuples", nodes, b.max_tuples);
    if (i == n) {
      if (std::all_of(left.begin(), left.end(), [](int v) { return v == 0; })) stop = !visit(cur);
      return;
    }
    for (const auto& x : fam[i]) {
      bool fits = true;
      for (int j = 0; j < m && fits; ++j) fits = x[j] <= left[j];
      if (!fits) continue;
      for (int j = 0; j < m; ++j) left[j] -= x[j];
      cur.push_back(x);
      rec(i + 1);
      cur.pop_back();
      for (int j = 0; j < m; ++j) left[j] += x[j];
      if (stop) return;
    }
  };
  rec(0);
}

std::vector<std::vector<Bundle>> full_demands(const MarketInstance& inst, const PriceVector& p) {
  std::vector<std::vector<Bundle>> fam;
  for (int i = 0; i < inst.n(); ++i) fam.push_back(demand(inst, i, p, DemandKind::full).bundles);
  return fam;
}

bool clears(const MarketInstance& inst, const PriceVector& p, const OracleBudget& b) {
  bool found = false;
  enumerate_tuples(full_demands(inst, p), inst.supply(), b, [&](const std::vector<Bundle>&) {
    found = true;
    return false;
  });
  return found;
}

}  // namespace

std::vector<PriceVector> brute_equilibrium_grid(const MarketInstance& inst, const OracleBudget& budget) {
  if (!inst.frictionless()) throw WrongMode("frictionless oracle needs identity payments");
  check_lattice(inst, budget);
  const Lattice& lat = inst.lattice();
  const int m = inst.m();
  long vmax = 0;
  for (const auto& b : inst.buyers())
    for (std::size_t k = 0; k < lat.size(); ++k) {
      const Rat& v = b.valuation.at_index(k);
      if (v.get_den() != 1) throw InvalidInput("frictionless oracle needs integer valuations");
      for (int j = 0; j < m; ++j) {
        Bundle y = lat.point(k);
        ++y[j];
        auto idx = lat.index(y);
        if (!idx) continue;
        Rat marg = b.valuation.at_index(*idx) - v;
        vmax = std::max(vmax, marg.get_num().get_si());
      }
    }
  double grid = 1;
  for (int j = 0; j < m; ++j) grid *= static_cast<double>(vmax + 1);
  if (grid > static_cast<double>(budget.max_lattice_points))
    refuse("max_lattice_points", static_cast<std::size_t>(grid), budget.max_lattice_points);

  std::vector<PriceVector> eq;
  std::vector<long> c(m, 0);
  while (true) {
    PriceVector p(m);
    for (int j = 0; j < m; ++j) p[j] = Rat(c[j]);
    if (clears(inst, p, budget)) eq.push_back(p);
    int j = 0;
    while (j < m && c[j] == vmax) c[j++] = 0;
    if (j == m) break;
    ++c[j];
  }
  return eq;
}

PriceVector brute_minimum_equilibrium_frictionless(const MarketInstance& inst,
                                                   const OracleBudget& budget) {
  const auto eq = brute_equilibrium_grid(inst, budget);
  if (eq.empty()) throw InternalError("no integer equilibrium price on the grid");
  auto meet = [](const PriceVector& a, const PriceVector& b) {
    PriceVector c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) c[j] = std::min(a[j], b[j]);
    return c;
  };
  PriceVector low = eq.front();
  for (const auto& p : eq) low = meet(low, p);
  if (std::find(eq.begin(), eq.end(), low) == eq.end())
    throw InternalError("grid equilibrium prices have no least element");
  if (eq.size() <= 200)
    for (const auto& a : eq)
      for (const auto& b : eq)
        if (std::find(eq.begin(), eq.end(), meet(a, b)) == eq.end())
          throw InternalError("grid equilibrium prices are not closed under meet");
  return low;
}

P2Optimum brute_p2_optimum(const std::vector<RankOracle>& ranks, const Bundle& supply,
                           const std::vector<std::vector<LexScalar>>& w, const OracleBudget& budget) {
  const int m = static_cast<int>(supply.size());
  if (m > kMaxGoods) refuse("max_subsets", std::size_t{1} << m, budget.max_subsets);
  if ((std::size_t{1} << m) > budget.max_subsets)
    refuse("max_subsets", std::size_t{1} << m, budget.max_subsets);
  // Points of P(rank_i) inside the supply box, by the defining inequalities.
  std::vector<std::vector<Bundle>> fam;
  for (const auto& r : ranks) {
    std::vector<Bundle> pts;
    Bundle x(m, 0);
    while (true) {
      bool ok = true;
      for (Mask s = 1; s < (Mask{1} << m) && ok; ++s) ok = sum_over(x, s) <= r.rank(s);
      if (ok) pts.push_back(x);
      if (pts.size() > budget.max_lattice_points)
        refuse("max_lattice_points", pts.size(), budget.max_lattice_points);
      int j = 0;
      while (j < m && x[j] == supply[j]) x[j++] = 0;
      if (j == m) break;
      ++x[j];
    }
    fam.push_back(std::move(pts));
  }
  // Pad with a slack pseudo-buyer so every sum <= s becomes a sum == s.
  std::vector<Bundle> slack;
  {
    Bundle x(m, 0);
    while (true) {
      slack.push_back(x);
      int j = 0;
      while (j < m && x[j] == supply[j]) x[j++] = 0;
      if (j == m) break;
      ++x[j];
    }
  }
  fam.push_back(slack);

  P2Optimum best;
  bool any = false;
  enumerate_tuples(fam, supply, budget, [&](const std::vector<Bundle>& t) {
    LexScalar v;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      for (int j = 0; j < m; ++j) v += w[i][j].scaled(t[i][j]);
    std::vector<Bundle> x(t.begin(), t.end() - 1);
    if (!any || v > best.value) {
      best.value = v;
      best.argset.assign(1, x);
      any = true;
    } else if (v == best.value) {
      best.argset.push_back(x);
    }
    return true;
  });
  return best;
}

std::vector<std::vector<Bundle>> brute_equilibrium_allocations(const MarketInstance& inst,
                                                               const PriceVector& p,
                                                               const OracleBudget& budget) {
  check_lattice(inst, budget);
  std::vector<std::vector<Bundle>> out;
  enumerate_tuples(full_demands(inst, p), inst.supply(), budget, [&](const std::vector<Bundle>& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

}  // namespace walras
