#include "walras/allocation.hpp"

#include <cmath>
#include <deque>
#include <string>

namespace walras {

DemandSets::DemandSets(const MarketInstance& inst, const DemandSnapshot& snap)
    : inst_(&inst), snap_(&snap) {
  for (int i = 0; i < inst.n(); ++i) {
    std::vector<char> mem(inst.lattice().size(), 0);
    for (auto k : snap.full.at(i)) mem[k] = 1;
    member_.push_back(std::move(mem));
  }
}

bool DemandSets::contains(int i, const Bundle& x) const {
  auto k = inst_->lattice().index(x);
  return k && member_.at(i)[*k];
}

int DemandSets::capacity(int i, const Bundle& x, std::optional<int> j, std::optional<int> jp) const {
  if (!contains(i, x)) throw InvalidInput("capacity: bundle outside the demand set");
  if (j && jp && *j == *jp) return 0;
  Bundle y = x;
  int alpha = 0;
  while (true) {
    if (j) ++y[*j];
    if (jp) --y[*jp];
    if (!contains(i, y)) return alpha;
    ++alpha;
  }
}

bool in_b1(const DemandSets& ds, const std::vector<Bundle>& x) {
  const MarketInstance& inst = ds.instance();
  if (static_cast<int>(x.size()) != inst.n()) return false;
  int total = 0;
  for (int i = 0; i < inst.n(); ++i) {
    if (!ds.contains(i, x[i])) return false;
    total += sum_over(x[i], full_mask(inst.m()));
  }
  return total == inst.total_supply();
}

int b1_capacity(const DemandSets& ds, const AllocationState& state, Element e,
                std::optional<Element> f) {
  if (!in_b1(ds, state.x)) throw InvalidInput("invalid-state: allocation point outside B1");
  if (!f) return 0;
  if (e.buyer == f->buyer) return ds.capacity(e.buyer, state.x[e.buyer], e.good, f->good);
  return std::min(ds.capacity(e.buyer, state.x[e.buyer], e.good, std::nullopt),
                  ds.capacity(f->buyer, state.x[f->buyer], std::nullopt, f->good));
}

namespace {

Bundle aggregate(const std::vector<Bundle>& x, int m) {
  Bundle y(m, 0);
  for (const auto& xi : x)
    for (int j = 0; j < m; ++j) y[j] += xi[j];
  return y;
}

void dfs(const DemandSets& ds, int i, Bundle& left, std::vector<Bundle>& cur,
         std::optional<std::vector<Bundle>>& found) {
  const MarketInstance& inst = ds.instance();
  if (found) return;
  if (i == inst.n()) {
    for (int v : left)
      if (v) return;
    found = cur;
    return;
  }
  for (auto k : ds.snap().full[i]) {
    const Bundle& x = inst.lattice().point(k);
    bool fits = true;
    for (int j = 0; j < inst.m() && fits; ++j) fits = x[j] <= left[j];
    if (!fits) continue;
    for (int j = 0; j < inst.m(); ++j) left[j] -= x[j];
    cur.push_back(x);
    dfs(ds, i + 1, left, cur, found);
    cur.pop_back();
    for (int j = 0; j < inst.m(); ++j) left[j] += x[j];
    if (found) return;
  }
}

// One augmentation: a chain of unit transfers inside B1 that moves one unit
// from an oversupplied good to an undersupplied one.
bool augment(const DemandSets& ds, AllocationState& st) {
  const MarketInstance& inst = ds.instance();
  const int n = inst.n(), m = inst.m();
  const Bundle y = aggregate(st.x, m);
  auto id = [m](Element e) { return e.buyer * m + e.good; };
  const int N = n * m;
  // Node = the element giving up a unit.
  std::vector<int> prev(N, -2);
  std::vector<Element> via(N);  // receiving element on the arc into this node
  std::deque<int> queue;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (y[j] > inst.supply()[j] && st.x[i][j] > 0) {
        prev[i * m + j] = -1;
        queue.push_back(i * m + j);
      }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    const Element e{u / m, u % m};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const Element f{i, j};
        if (id(f) == u || j == e.good) continue;
        if (b1_capacity(ds, st, f, e) < 1) continue;
        if (y[j] < inst.supply()[j]) {
          std::vector<std::pair<Element, Element>> moves{{e, f}};
          for (int v = u; prev[v] >= 0; v = prev[v]) moves.emplace_back(Element{prev[v] / m, prev[v] % m}, via[v]);
          std::vector<Bundle> x = st.x;
          for (auto [out, in] : moves) {
            --x[out.buyer][out.good];
            ++x[in.buyer][in.good];
          }
          bool ok = true;
          for (const auto& xi : x)
            for (int v : xi) ok = ok && v >= 0;
          if (ok && in_b1(ds, x)) {
            st.x = std::move(x);
            return true;
          }
          continue;
        }
        // Jump to any holder of good j, including f itself.
        for (int k = 0; k < n; ++k) {
          const int w = k * m + j;
          if (prev[w] != -2) continue;
          if (st.x[k][j] == 0 && k != i) continue;
          prev[w] = u;
          via[w] = f;
          queue.push_back(w);
        }
      }
  }
  return false;
}

std::optional<std::vector<Bundle>> capacity_procedure(const DemandSets& ds) {
  const MarketInstance& inst = ds.instance();
  const int n = inst.n(), m = inst.m();
  AllocationState st;
  for (int i = 0; i < n; ++i) st.x.push_back(ds.snap().minimal[i].bundles.front());
  int total = 0;
  for (const auto& xi : st.x) total += sum_over(xi, full_mask(m));
  if (total > inst.total_supply()) return std::nullopt;
  // Saturation: grow bundles inside the demand sets until x(E) = s(M).
  for (int i = 0; i < n && total < inst.total_supply(); ++i)
    for (int j = 0; j < m && total < inst.total_supply(); ++j) {
      int a = std::min(ds.capacity(i, st.x[i], j, std::nullopt), inst.total_supply() - total);
      st.x[i][j] += a;
      total += a;
      if (a > 0) j = -1;
    }
  if (total < inst.total_supply()) return std::nullopt;
  if (!in_b1(ds, st.x)) throw InternalError("saturation left B1");
  const int limit = inst.total_supply() * n * m + 1;
  for (int it = 0; it <= limit; ++it) {
    if (aggregate(st.x, m) == inst.supply()) {
      st.phase = AllocationState::Phase::done;
      return st.x;
    }
    if (!augment(ds, st)) return std::nullopt;
  }
  return std::nullopt;
}

double brute_size(const MarketInstance& inst) {
  double t = 1;
  for (int j = 0; j < inst.m(); ++j) t *= std::pow(inst.supply()[j] + 1.0, inst.n());
  return t;
}

}  // namespace

std::optional<std::vector<Bundle>> first_common_point(const DemandSets& ds) {
  Bundle left = ds.instance().supply();
  std::vector<Bundle> cur;
  std::optional<std::vector<Bundle>> found;
  dfs(ds, 0, left, cur, found);
  return found;
}

std::vector<Bundle> compute_allocation(const MarketInstance& inst, const PriceVector& p,
                                       AllocationMode mode) {
  DemandSnapshot snap = snapshot(inst, p);
  if (!is_equilibrium_price(inst, snap).ok)
    throw InvalidInput("allocation requested at a price that is not an equilibrium");
  DemandSets ds(inst, snap);
  std::optional<std::vector<Bundle>> x;
  if (mode != AllocationMode::brute) x = capacity_procedure(ds);
  const bool small = brute_size(inst) <= kBruteAllocationLimit;
  if (!x && (mode == AllocationMode::brute || (mode == AllocationMode::automatic && small)))
    x = first_common_point(ds);
  if (!x) throw InternalError("no equilibrium allocation found at an equilibrium price");
  if (!in_b1(ds, *x) || aggregate(*x, inst.m()) != inst.supply())
    throw InternalError("allocation fails the equilibrium conditions");
  return *x;
}

}  // namespace walras
