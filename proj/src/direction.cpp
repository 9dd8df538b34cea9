#include "walras/direction.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace walras {

namespace {

struct Arc {
  int from, to;
  LexScalar w;
};

// Longest path labels from root by label correcting; throws on a positive cycle.
std::vector<std::optional<LexScalar>> longest_from(int nodes, int root, const std::vector<Arc>& arcs) {
  std::vector<std::optional<LexScalar>> dist(nodes);
  dist[root] = LexScalar::zero();
  for (int round = 0; round <= nodes; ++round) {
    bool changed = false;
    for (const auto& a : arcs) {
      if (!dist[a.from]) continue;
      LexScalar cand = *dist[a.from] + a.w;
      if (!dist[a.to] || cand > *dist[a.to]) {
        dist[a.to] = cand;
        changed = true;
      }
    }
    if (!changed) return dist;
  }
  throw InternalError("positive cycle in dual difference constraints");
}

Bundle add_unit(Bundle x, int j) {
  ++x[j];
  return x;
}

Bundle swap_unit(Bundle x, int out, int in) {
  --x[out];
  ++x[in];
  return x;
}

// Residual network for a small min-cost flow with LexScalar costs.
class LexFlow {
 public:
  explicit LexFlow(int nodes) : head_(nodes, -1) {}

  int add(int u, int v, int cap, const LexScalar& cost) {
    edges_.push_back({v, cap, cost, head_[u]});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, 0, -cost, head_[v]});
    head_[v] = static_cast<int>(edges_.size()) - 1;
    return static_cast<int>(edges_.size()) - 2;
  }

  // One unit along a cheapest s-t path; false if t is unreachable.
  bool augment(int s, int t) {
    const int n = static_cast<int>(head_.size());
    std::vector<std::optional<LexScalar>> dist(n);
    std::vector<int> via(n, -1);
    dist[s] = LexScalar::zero();
    for (int round = 0; round <= n; ++round) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        if (!dist[u]) continue;
        for (int e = head_[u]; e >= 0; e = edges_[e].next) {
          if (edges_[e].cap <= 0) continue;
          LexScalar cand = *dist[u] + edges_[e].cost;
          int v = edges_[e].to;
          if (!dist[v] || cand < *dist[v]) {
            dist[v] = cand;
            via[v] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
      if (round == n) throw InternalError("negative cycle in assignment residual graph");
    }
    if (!dist[t]) return false;
    for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
      --edges_[via[v]].cap;
      ++edges_[via[v] ^ 1].cap;
    }
    return true;
  }

  int flow(int e) const { return edges_[e ^ 1].cap; }

 private:
  struct Edge {
    int to, cap;
    LexScalar cost;
    int next;
  };
  std::vector<int> head_;
  std::vector<Edge> edges_;
};

}  // namespace

DirectionInput direction_input(const MarketInstance& inst, const DemandSnapshot& snap) {
  return DirectionInput{inst.m(), inst.supply(), snap.check_rank, snap.slopes};
}

LexWeightMatrix build_weights(const std::vector<std::vector<Rat>>& slopes) {
  LexWeightMatrix w;
  for (const auto& row : slopes) {
    std::vector<LexScalar> r;
    for (const auto& q : row) r.push_back(lex_from_slope(q));
    w.push_back(std::move(r));
  }
  return w;
}

LexWeightMatrix build_weights(const MarketInstance& inst, const PriceVector& p) {
  validate_price(inst, p);
  std::vector<std::vector<Rat>> slopes;
  for (int i = 0; i < inst.n(); ++i) {
    std::vector<Rat> row;
    for (int j = 0; j < inst.m(); ++j) row.push_back(inst.buyer(i).payments[j].right_slope(p[j]));
    slopes.push_back(std::move(row));
  }
  return build_weights(slopes);
}

// Weighted matroid intersection on unit copies: the union of the buyers'
// polymatroids against the supply capacities. Shortest augmenting paths
// (by length, then by number of arcs) keep every intermediate solution
// extreme, so the final one is lexicographically optimal.
PolymatroidSumSolution solve_polymatroid_sum(const std::vector<RankOracle>& ranks,
                                             const Bundle& supply, const LexWeightMatrix& w) {
  const int n = static_cast<int>(ranks.size());
  const int m = static_cast<int>(supply.size());
  struct Elem {
    int buyer, good;
  };
  std::vector<Elem> el;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      int c = std::min(ranks[i].rank(1u << j), supply[j]);
      for (int k = 0; k < c; ++k) el.push_back({i, j});
    }
  const int E = static_cast<int>(el.size());
  std::vector<char> in(E, 0);
  std::vector<Bundle> x(n, Bundle(m, 0));
  Bundle load(m, 0);

  while (true) {
    // Feasibility tables for the current x.
    std::vector<std::vector<char>> add_ok(n, std::vector<char>(m, 0));
    std::vector<std::vector<std::vector<char>>> swap_ok(
        n, std::vector<std::vector<char>>(m, std::vector<char>(m, 0)));
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) {
        add_ok[i][a] = in_polymatroid(ranks[i], add_unit(x[i], a));
        if (x[i][a] == 0) continue;
        for (int b = 0; b < m; ++b)
          swap_ok[i][a][b] = a == b || in_polymatroid(ranks[i], swap_unit(x[i], a, b));
      }
    auto len = [&](int e) { return in[e] ? w[el[e].buyer][el[e].good] : -w[el[e].buyer][el[e].good]; };

    std::vector<std::optional<std::pair<LexScalar, int>>> dist(E);
    std::vector<int> pred(E, -1);
    for (int e = 0; e < E; ++e)
      if (!in[e] && add_ok[el[e].buyer][el[e].good]) dist[e] = std::make_pair(len(e), 0);
    auto arc = [&](int u, int v) {
      if (in[u] == in[v]) return false;
      if (in[u]) {  // I - u + v independent in the buyers' union
        if (el[u].buyer == el[v].buyer) return static_cast<bool>(swap_ok[el[u].buyer][el[u].good][el[v].good]);
        return static_cast<bool>(add_ok[el[v].buyer][el[v].good]);
      }
      // I - v + u within supply
      return el[u].good == el[v].good || load[el[u].good] + 1 <= supply[el[u].good];
    };
    for (int round = 0; round <= E; ++round) {
      bool changed = false;
      for (int u = 0; u < E; ++u) {
        if (!dist[u]) continue;
        for (int v = 0; v < E; ++v) {
          if (!arc(u, v)) continue;
          std::pair<LexScalar, int> cand{dist[u]->first + len(v), dist[u]->second + 1};
          if (!dist[v] || cand < *dist[v]) {
            dist[v] = cand;
            pred[v] = u;
            changed = true;
          }
        }
      }
      if (!changed) break;
      if (round == E) throw InternalError("negative cycle in polymatroid sum exchange graph");
    }
    int best = -1;
    for (int e = 0; e < E; ++e) {
      if (in[e] || !dist[e] || load[el[e].good] + 1 > supply[el[e].good]) continue;
      if (best < 0 || *dist[e] < *dist[best]) best = e;
    }
    if (best < 0) break;
    for (int v = best; v >= 0; v = pred[v]) {
      in[v] = !in[v];
      int d = in[v] ? 1 : -1;
      x[el[v].buyer][el[v].good] += d;
      load[el[v].good] += d;
    }
    for (int i = 0; i < n; ++i)
      if (!in_polymatroid(ranks[i], x[i]))
        throw InternalError("augmentation left buyer " + std::to_string(i + 1) + " infeasible");
    for (int j = 0; j < m; ++j)
      if (load[j] > supply[j]) throw InternalError("augmentation exceeded supply");
  }

  PolymatroidSumSolution sol;
  sol.x = x;
  sol.slack.assign(m, 0);
  for (int j = 0; j < m; ++j) sol.slack[j] = supply[j] - load[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) sol.value += w[i][j].scaled(x[i][j]);
  return sol;
}

ExchangeGraph build_exchange_graph(const std::vector<RankOracle>& ranks, const Bundle& supply,
                                   const PolymatroidSumSolution& sol) {
  const int n = static_cast<int>(ranks.size());
  const int m = static_cast<int>(supply.size());
  ExchangeGraph g;
  for (int i = 0; i < n; ++i) {
    Bundle xp = sol.x[i];
    if (!in_polymatroid(ranks[i], xp)) throw InvalidInput("primal point outside polymatroid");
    const int target = ranks[i].rank(full_mask(m));
    while (sum_over(xp, full_mask(m)) < target) {
      int j = 0;
      while (j < m && !in_polymatroid(ranks[i], add_unit(xp, j))) ++j;
      if (j == m) throw InternalError("cannot extend bundle to a minimal demand bundle");
      ++xp[j];
    }
    g.extended.push_back(xp);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < xp[j]; ++k) g.copies.push_back({i, j});
  }
  for (int k = 0; k < static_cast<int>(g.copies.size()); ++k) {
    const auto [i, phi] = g.copies[k];
    for (int jp = 0; jp < m; ++jp) {
      if (jp == phi) continue;
      if (in_base(ranks[i], swap_unit(g.extended[i], phi, jp))) g.backward.emplace_back(jp, k);
    }
  }
  for (int j = 0; j < m; ++j) {
    int t = 0;
    for (int i = 0; i < n; ++i) t += g.extended[i][j];
    if (t > supply[j]) g.oversold |= 1u << j;
  }
  return g;
}

Mask xstar_by_reachability(const ExchangeGraph& g) {
  Mask reach = g.oversold;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto [good, k] : g.backward) {
      if (contains(reach, g.copies[k].good) && !contains(reach, good)) {
        reach |= 1u << good;
        changed = true;
      }
    }
  }
  return reach;
}

DualSolution solve_virtual_assignment(const ExchangeGraph& g, Mask xstar, const LexWeightMatrix& w,
                                      const Bundle& supply) {
  const int m = static_cast<int>(supply.size());
  DualSolution out;
  out.xstar = xstar;
  out.z.assign(m, LexScalar::zero());
  if (xstar == 0) return out;

  std::vector<int> kstar;
  for (int k = 0; k < static_cast<int>(g.copies.size()); ++k)
    if (contains(xstar, g.copies[k].good)) kstar.push_back(k);
  const int K = static_cast<int>(kstar.size());
  // Edges of the induced graph as (local copy, good).
  std::vector<std::vector<int>> adj(K);
  for (int a = 0; a < K; ++a) adj[a].push_back(g.copies[kstar[a]].good);
  for (auto [good, k] : g.backward) {
    if (!contains(xstar, good)) continue;
    auto it = std::find(kstar.begin(), kstar.end(), k);
    if (it != kstar.end()) adj[it - kstar.begin()].push_back(good);
  }
  auto value = [&](int a, int j) { return w[g.copies[kstar[a]].owner][j]; };

  const int src = 0, sink = K + m + 1;
  LexFlow flow(K + m + 2);
  std::vector<std::vector<std::pair<int, int>>> edge_of(K);  // (good, edge id)
  for (int a = 0; a < K; ++a) {
    flow.add(src, 1 + a, 1, LexScalar::zero());
    for (int j : adj[a]) edge_of[a].emplace_back(j, flow.add(1 + a, 1 + K + j, 1, -value(a, j)));
  }
  for (int j : elements(xstar)) flow.add(1 + K + j, sink, supply[j], LexScalar::zero());
  while (flow.augment(src, sink)) {
  }

  std::vector<int> sigma(K, -1);
  Bundle sold(m, 0);
  for (int a = 0; a < K; ++a)
    for (auto [j, e] : edge_of[a])
      if (flow.flow(e) > 0) {
        sigma[a] = j;
        ++sold[j];
      }
  for (int j : elements(xstar))
    if (sold[j] != supply[j])
      throw InternalError("virtual assignment cannot saturate good " + std::to_string(j + 1));

  // Least prices: z_j >= v_kj for unassigned copies, z_j >= z_sigma + v_kj - v_ksigma.
  const int root = m;
  std::vector<Arc> arcs;
  for (int j : elements(xstar)) arcs.push_back({root, j, LexScalar::zero()});
  for (int a = 0; a < K; ++a)
    for (int j : adj[a]) {
      if (sigma[a] < 0)
        arcs.push_back({root, j, value(a, j)});
      else if (j != sigma[a])
        arcs.push_back({sigma[a], j, value(a, j) - value(a, sigma[a])});
    }
  auto dist = longest_from(m + 1, root, arcs);
  for (int j : elements(xstar)) out.z[j] = *dist[j];
  for (int a = 0; a < K; ++a)
    if (sigma[a] >= 0 && out.z[sigma[a]] > value(a, sigma[a]))
      throw InternalError("virtual assignment prices leave an assigned copy with negative surplus");
  for (int j : elements(xstar))
    if (out.z[j].base() != 1)
      throw InternalError("minimal dual has base " + to_string(out.z[j].base()) + " on good " +
                          std::to_string(j + 1));
  return out;
}

std::vector<LexScalar> minimal_dual_full(const std::vector<RankOracle>& ranks, const Bundle& supply,
                                         const LexWeightMatrix& w, const PolymatroidSumSolution& sol) {
  const int n = static_cast<int>(ranks.size());
  const int m = static_cast<int>(supply.size());
  const int root = m;
  std::vector<Arc> arcs;
  for (int j = 0; j < m; ++j) arcs.push_back({root, j, LexScalar::zero()});
  for (int i = 0; i < n; ++i) {
    const Bundle& x = sol.x[i];
    for (int b = 0; b < m; ++b)
      if (in_polymatroid(ranks[i], add_unit(x, b))) arcs.push_back({root, b, w[i][b]});
    for (int a = 0; a < m; ++a) {
      if (x[a] == 0) continue;
      for (int b = 0; b < m; ++b)
        if (b != a && in_polymatroid(ranks[i], swap_unit(x, a, b)))
          arcs.push_back({a, b, w[i][b] - w[i][a]});
    }
  }
  auto dist = longest_from(m + 1, root, arcs);
  std::vector<LexScalar> z(m);
  for (int j = 0; j < m; ++j) z[j] = *dist[j];
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a)
      if (sol.x[i][a] > 0 && z[a] > w[i][a])
        throw InternalError("complementary slackness: dual exceeds weight of a held unit");
  for (int j = 0; j < m; ++j)
    if (sol.slack[j] > 0 && !(z[j] == LexScalar::zero()))
      throw InternalError("complementary slackness: positive dual on an unsaturated good");
  return z;
}

Direction extract_direction(const DualSolution& z) {
  Direction d;
  d.support = z.xstar;
  d.d.assign(z.z.size(), Rat(0));
  for (int j : elements(z.xstar)) d.d[j] = z.z[j].logarg();
  return d;
}

Direction zero_direction(int m) { return Direction{std::vector<Rat>(m, Rat(0)), 0}; }

RankOracle perturbed_minimal_demand(const RankOracle& rank, Mask xstar, const std::vector<Rat>& costs) {
  const Mask rest = rank.ground() & ~xstar;
  RankOracle outside = restrict(rank, rest);
  RankOracle inner = contract(rank, rest);
  std::vector<LexScalar> wts(rank.universe());
  for (int j : elements(inner.ground())) wts[j] = LexScalar::constant(Rat(-costs.at(j)));
  return direct_sum(outside, greedy_max(inner, wts, true).face);
}

std::vector<RankOracle> perturbed_ranks(const DirectionInput& in, Mask xstar, const Direction& d) {
  std::vector<RankOracle> out;
  for (std::size_t i = 0; i < in.ranks.size(); ++i) {
    std::vector<Rat> costs(in.m);
    for (int j = 0; j < in.m; ++j) costs[j] = in.slopes[i][j] * d.d[j];
    out.push_back(perturbed_minimal_demand(in.ranks[i], xstar, costs));
  }
  return out;
}

Certificate lsc_certificate(const std::vector<RankOracle>& perturbed, Mask xstar, const Bundle& supply) {
  // Minimal minimizer of s(X) + rank'(X* \ X) over X inside X*.
  auto f = [&](Mask x) {
    int v = sum_over(supply, x);
    for (const auto& pr : perturbed) v += pr.rank(xstar & ~x);
    return v;
  };
  std::optional<int> best;
  for (Mask x = 0; x <= xstar; ++x)
    if (is_subset(x, xstar) && (!best || f(x) < *best)) best = f(x);
  Mask meet = xstar;
  for (Mask x = 0; x <= xstar; ++x)
    if (is_subset(x, xstar) && f(x) == *best) meet &= x;
  if (f(meet) != *best) throw InternalError("perturbed minimizers not closed under intersection");
  if (meet == xstar) return {};
  return {false, meet};
}

Certificate lsc_certificate(const DirectionInput& in, Mask xstar, const Direction& d) {
  return lsc_certificate(perturbed_ranks(in, xstar, d), xstar, in.supply);
}

PerturbedTable perturbed_table(const std::vector<RankOracle>& perturbed, Mask xstar,
                               const Bundle& supply) {
  PerturbedTable t;
  t.buyer_rows.resize(perturbed.size());
  for (Mask x = 0; x <= xstar; ++x) {
    if (!is_subset(x, xstar)) continue;
    t.subsets.push_back(x);
    int obj = sum_over(supply, x);
    for (std::size_t i = 0; i < perturbed.size(); ++i) {
      t.buyer_rows[i].push_back(perturbed[i].rank(x));
      obj += perturbed[i].rank(xstar & ~x);
    }
    t.objective.push_back(obj);
  }
  return t;
}

std::optional<SlopeFactorization> factor_slopes(const std::vector<std::vector<Rat>>& slopes) {
  if (slopes.empty() || slopes[0].empty()) return std::nullopt;
  SlopeFactorization f;
  f.beta = slopes[0];
  for (const auto& row : slopes) {
    Rat a = row[0] / f.beta[0];
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] != a * f.beta[j]) return std::nullopt;
    f.alpha.push_back(a);
  }
  return f;
}

Direction separable_direction(const std::vector<Rat>& beta, Mask xstar) {
  Direction d = zero_direction(static_cast<int>(beta.size()));
  d.support = xstar;
  for (int j : elements(xstar)) d.d[j] = 1 / beta[j];
  return d;
}

Direction separable_direction(const std::vector<std::vector<Rat>>& slopes, Mask xstar) {
  auto f = factor_slopes(slopes);
  if (!f) throw NotSeparable("slope matrix has no rank-one factorization at this price");
  return separable_direction(f->beta, xstar);
}

LexScalar eval_dual_objective(const std::vector<RankOracle>& ranks, const Bundle& supply,
                              const LexWeightMatrix& w, const std::vector<LexScalar>& z) {
  const int m = static_cast<int>(supply.size());
  for (const auto& zj : z)
    if (zj < LexScalar::zero()) throw InvalidInput("dual objective needs z >= 0");
  LexScalar total;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    std::vector<LexScalar> u(m);
    for (int j = 0; j < m; ++j) u[j] = w[i][j] - z[j];
    total += greedy_max(ranks[i], u, false).value;
  }
  for (int j = 0; j < m; ++j) total += z[j].scaled(supply[j]);
  return total;
}

std::optional<Mask> dual_minimality_violation(const std::vector<RankOracle>& ranks,
                                              const Bundle& supply, const LexWeightMatrix& w,
                                              const std::vector<LexScalar>& z, Mask xstar) {
  const int m = static_cast<int>(supply.size());
  // Shrink factor strictly between 1 and the closest ratio of distinct logargs.
  std::vector<Rat> vals{Rat(1)};
  for (const auto& row : w)
    for (int j = 0; j < m; ++j) vals.push_back((row[j] - z[j]).logarg());
  for (const auto& zj : z) vals.push_back(zj.logarg());
  std::optional<Rat> gap;
  for (const auto& a : vals)
    for (const auto& b : vals)
      if (a > b) {
        Rat r = a / b;
        if (!gap || r < *gap) gap = r;
      }
  const Rat factor = gap ? Rat((1 + *gap) / 2) : Rat(2);

  const LexScalar base = eval_dual_objective(ranks, supply, w, z);
  for (Mask x = 1; x <= xstar; ++x) {
    if (!is_subset(x, xstar)) continue;
    std::vector<LexScalar> zz = z;
    for (int j : elements(x)) zz[j] = LexScalar(zz[j].base(), Rat(zz[j].logarg() / factor));
    if (!(eval_dual_objective(ranks, supply, w, zz) > base)) return x;
  }
  return std::nullopt;
}

DirectionResult compute_direction(const DirectionInput& in) {
  DirectionResult r;
  r.w = build_weights(in.slopes);
  const Mask by_sfm = minimal_minimizer(in.ranks, in.supply);
  r.primal = solve_polymatroid_sum(in.ranks, in.supply, r.w);
  r.graph = build_exchange_graph(in.ranks, in.supply, r.primal);
  const Mask by_graph = xstar_by_reachability(r.graph);
  if (by_graph != by_sfm)
    throw InternalError("X* by reachability (" + std::to_string(by_graph) +
                        ") differs from the minimal minimizer (" + std::to_string(by_sfm) + ")");
  r.xstar = by_sfm;
  r.z_full = minimal_dual_full(in.ranks, in.supply, r.w, r.primal);
  for (int j = 0; j < in.m; ++j)
    if (r.z_full[j].base() != (contains(r.xstar, j) ? 1 : 0))
      throw InternalError("minimal dual base tier is not the indicator of X*");
  r.dual = solve_virtual_assignment(r.graph, r.xstar, r.w, in.supply);
  for (int j : elements(r.xstar))
    if (!(r.dual.z[j] == r.z_full[j]))
      throw InternalError("assignment prices " + r.dual.z[j].str() + " and slackness duals " +
                          r.z_full[j].str() + " disagree on good " + std::to_string(j + 1));
  r.direction = r.xstar ? extract_direction(r.dual) : zero_direction(in.m);
  r.dual_value = eval_dual_objective(in.ranks, in.supply, r.w, r.z_full);
  if (!(r.dual_value == r.primal.value))
    throw InternalError("primal " + r.primal.value.str() + " and dual " + r.dual_value.str() +
                        " values differ");
  return r;
}

}  // namespace walras
