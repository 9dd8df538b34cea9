#include "walras/market.hpp"

#include <algorithm>
#include <sstream>

namespace walras {

namespace {

std::string show(const Bundle& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? "," : "") << x[j];
  os << ")";
  return os.str();
}

}  // namespace

// ---- payments ----

PiecewisePayment PiecewisePayment::identity() { return linear(Rat(1)); }

PiecewisePayment PiecewisePayment::linear(const Rat& slope) {
  return from_breakpoints({{Rat(0), Rat(0)}}, slope);
}

PiecewisePayment PiecewisePayment::from_breakpoints(std::vector<std::pair<Rat, Rat>> bp,
                                                     Rat tail) {
  if (bp.empty() || bp.front().first != 0 || bp.front().second != 0)
    throw InvalidInput("payment breakpoints must start at (0, 0)");
  for (std::size_t k = 1; k < bp.size(); ++k) {
    if (!(bp[k].first > bp[k - 1].first))
      throw InvalidInput("payment breakpoint prices must increase");
    if (!(bp[k].second > bp[k - 1].second))
      throw InvalidInput("payments must be strictly increasing");
  }
  if (sgn(tail) <= 0) throw InvalidInput("payment tail slope must be positive");
  PiecewisePayment q(std::move(bp), std::move(tail), 0);
  return q;
}

PiecewisePayment::PiecewisePayment(std::vector<std::pair<Rat, Rat>> bp, Rat tail, int)
    : bp_(std::move(bp)), tail_(std::move(tail)) {}

namespace {

// Index of the segment whose half-open interval [b_k, b_{k+1}) holds price.
std::size_t segment_of(const std::vector<std::pair<Rat, Rat>>& bp, const Rat& price) {
  std::size_t k = 0;
  while (k + 1 < bp.size() && bp[k + 1].first <= price) ++k;
  return k;
}

}  // namespace

Rat PiecewisePayment::right_slope(const Rat& price) const {
  if (sgn(price) < 0) throw InvalidInput("negative price");
  std::size_t k = segment_of(bp_, price);
  if (k + 1 == bp_.size()) return tail_;
  return Rat((bp_[k + 1].second - bp_[k].second) / (bp_[k + 1].first - bp_[k].first));
}

Rat PiecewisePayment::at(const Rat& price) const {
  if (sgn(price) < 0) throw InvalidInput("negative price");
  std::size_t k = segment_of(bp_, price);
  return Rat(bp_[k].second + right_slope(bp_[k].first) * (price - bp_[k].first));
}

std::optional<Rat> PiecewisePayment::next_breakpoint(const Rat& price) const {
  for (const auto& [b, _] : bp_)
    if (b > price) return b;
  return std::nullopt;
}

Rat payment_at(const PiecewisePayment& q, const Rat& price) { return q.at(price); }
Rat right_slope(const PiecewisePayment& q, const Rat& price) { return q.right_slope(price); }

// ---- lattice ----

Lattice::Lattice(Bundle cap) : cap_(std::move(cap)) {
  std::size_t total = 1;
  stride_.resize(cap_.size());
  for (std::size_t j = 0; j < cap_.size(); ++j) {
    if (cap_[j] < 0) throw InvalidInput("negative supply");
    stride_[j] = total;
    total *= static_cast<std::size_t>(cap_[j]) + 1;
    if (total > kMaxLatticePoints)
      throw InvalidInput("bundle box exceeds " + std::to_string(kMaxLatticePoints) +
                         " lattice points");
  }
  points_.reserve(total);
  Bundle x(cap_.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    points_.push_back(x);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < cap_[j]) {
        ++x[j];
        break;
      }
      x[j] = 0;
    }
  }
}

std::optional<std::size_t> Lattice::index(const Bundle& x) const {
  if (x.size() != cap_.size()) return std::nullopt;
  std::size_t k = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < 0 || x[j] > cap_[j]) return std::nullopt;
    k += stride_[j] * static_cast<std::size_t>(x[j]);
  }
  return k;
}

// ---- valuations ----

std::string MnaturalWitness::describe() const {
  return "exchange fails for x=" + show(x) + " y=" + show(y) + " j=" + std::to_string(j + 1);
}

std::optional<MnaturalWitness> find_mnatural_violation(const Lattice& lat,
                                                       const std::vector<Rat>& v) {
  const int m = static_cast<int>(lat.cap().size());
  auto val = [&](const Bundle& b) -> const Rat& { return v[*lat.index(b)]; };

  constexpr std::size_t kPairwiseLimit = 2000;
  if (lat.size() <= kPairwiseLimit) {
    for (const auto& x : lat.points()) {
      for (const auto& y : lat.points()) {
        const Rat lhs = val(x) + val(y);
        for (int j = 0; j < m; ++j) {
          if (x[j] <= y[j]) continue;
          Bundle a = x, b = y;
          --a[j];
          ++b[j];
          bool ok = val(a) + val(b) >= lhs;
          for (int k = 0; k < m && !ok; ++k) {
            if (x[k] >= y[k]) continue;
            ++a[k];
            --b[k];
            ok = val(a) + val(b) >= lhs;
            --a[k];
            ++b[k];
          }
          if (!ok) return MnaturalWitness{x, y, j};
        }
      }
    }
    return std::nullopt;
  }

  // Local exchange conditions on neighbouring points.
  auto in = [&](const Bundle& b) { return lat.in_box(b); };
  for (const auto& x : lat.points()) {
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        Bundle xij = x;
        ++xij[i];
        ++xij[j];
        if (!in(xij)) continue;
        Bundle xi = x, xj = x;
        ++xi[i];
        ++xj[j];
        if (val(xij) + val(x) > val(xi) + val(xj)) return MnaturalWitness{xij, x, i};
        for (int k = 0; k < m; ++k) {
          if (k == i || k == j) continue;
          Bundle xk = x, xik = x, xjk = x;
          ++xk[k];
          ++xik[i];
          ++xik[k];
          ++xjk[j];
          ++xjk[k];
          if (!in(xik) || !in(xjk)) continue;
          const Rat lhs = val(xij) + val(xk);
          if (lhs > std::max(Rat(val(xik) + val(xj)), Rat(val(xjk) + val(xi))))
            return MnaturalWitness{xij, xk, i};
        }
      }
    }
  }
  return std::nullopt;
}

Valuation::Valuation(Bundle cap, std::vector<Rat> values)
    : lattice_(std::move(cap)), values_(std::move(values)) {
  if (values_.size() != lattice_.size())
    throw InvalidInput("valuation table has " + std::to_string(values_.size()) +
                       " entries, expected " + std::to_string(lattice_.size()));
  if (values_[0] != 0) throw ValuationError("valuation not normalized: v(0) != 0", std::nullopt);
  for (std::size_t k = 0; k < lattice_.size(); ++k) {
    Bundle x = lattice_.point(k);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == lattice_.cap()[j]) continue;
      ++x[j];
      if (values_[*lattice_.index(x)] < values_[k])
        throw ValuationError("valuation not monotone at " + show(lattice_.point(k)),
                             std::nullopt);
      --x[j];
    }
  }
  if (auto w = find_mnatural_violation(lattice_, values_))
    throw ValuationError("valuation not M-natural concave: " + w->describe(), w);
}

const Rat& Valuation::at(const Bundle& x) const {
  auto k = lattice_.index(x);
  if (!k) throw InvalidInput("bundle " + show(x) + " outside the supply box");
  return values_[*k];
}

Valuation Valuation::from_bundles(const Bundle& cap,
                                  const std::vector<std::pair<Bundle, Rat>>& table) {
  Lattice lat(cap);
  std::vector<std::optional<Rat>> seen(lat.size());
  for (const auto& [x, v] : table) {
    auto k = lat.index(x);
    if (!k) throw InvalidInput("bundle " + show(x) + " outside the supply box");
    if (seen[*k]) throw InvalidInput("duplicate bundle " + show(x));
    seen[*k] = v;
  }
  std::vector<Rat> values(lat.size());
  for (std::size_t k = 0; k < lat.size(); ++k) {
    if (!seen[k]) throw InvalidInput("valuation table missing bundle " + show(lat.point(k)));
    values[k] = *seen[k];
  }
  return Valuation(cap, std::move(values));
}

Valuation Valuation::additive(const Bundle& cap, const std::vector<Rat>& a) {
  Lattice lat(cap);
  if (a.size() != cap.size()) throw InvalidInput("additive valuation size mismatch");
  std::vector<Rat> values;
  for (const auto& x : lat.points()) {
    Rat t = 0;
    for (std::size_t j = 0; j < x.size(); ++j) t += a[j] * x[j];
    values.push_back(t);
  }
  return Valuation(cap, std::move(values));
}

Valuation Valuation::unit_demand(const Bundle& cap, const std::vector<Rat>& a) {
  Lattice lat(cap);
  if (a.size() != cap.size()) throw InvalidInput("unit-demand valuation size mismatch");
  std::vector<Rat> values;
  for (const auto& x : lat.points()) {
    Rat t = 0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] > 0 && a[j] > t) t = a[j];
    values.push_back(t);
  }
  return Valuation(cap, std::move(values));
}

// ---- instance ----

MarketInstance::MarketInstance(Bundle supply, std::vector<Buyer> buyers)
    : supply_(std::move(supply)), buyers_(std::move(buyers)) {
  if (supply_.empty() || static_cast<int>(supply_.size()) > kMaxGoods)
    throw InvalidInput("number of goods must be between 1 and 16");
  for (int s : supply_)
    if (s < 0) throw InvalidInput("supply must be nonnegative");
  if (buyers_.size() < 2) throw InvalidInput("market needs at least two buyers");
  for (std::size_t i = 0; i < buyers_.size(); ++i) {
    if (buyers_[i].valuation.cap() != supply_)
      throw InvalidInput("buyer " + std::to_string(i + 1) + " valuation box differs from supply");
    if (buyers_[i].payments.size() != supply_.size())
      throw InvalidInput("buyer " + std::to_string(i + 1) + " needs one payment per good");
  }
}

int MarketInstance::total_supply() const {
  int t = 0;
  for (int s : supply_) t += s;
  return t;
}

int MarketInstance::total_breakpoints() const {
  int t = 0;
  for (const auto& b : buyers_)
    for (const auto& q : b.payments) t += q.interior_breakpoints();
  return t;
}

bool MarketInstance::frictionless() const {
  const auto id = PiecewisePayment::identity();
  for (const auto& b : buyers_)
    for (const auto& q : b.payments)
      if (!(q == id)) return false;
  return true;
}

// ---- demand ----

void validate_price(const MarketInstance& inst, const PriceVector& p) {
  if (static_cast<int>(p.size()) != inst.m()) throw InvalidInput("price vector size mismatch");
  for (const auto& pj : p)
    if (sgn(pj) < 0) throw InvalidInput("negative price");
}

Rat utility(const MarketInstance& inst, int i, const Bundle& x, const PriceVector& p) {
  validate_price(inst, p);
  const Buyer& b = inst.buyer(i);
  Rat u = b.valuation.at(x);
  for (int j = 0; j < inst.m(); ++j) u -= b.payments[j].at(p[j]) * x[j];
  return u;
}

namespace {

struct BuyerDemand {
  std::vector<std::size_t> full;
  Rat best;
};

BuyerDemand demand_indices(const MarketInstance& inst, int i, const PriceVector& p) {
  validate_price(inst, p);
  const Buyer& b = inst.buyer(i);
  const Lattice& lat = b.valuation.lattice();
  std::vector<Rat> unit(inst.m());
  for (int j = 0; j < inst.m(); ++j) unit[j] = b.payments[j].at(p[j]);
  BuyerDemand out;
  for (std::size_t k = 0; k < lat.size(); ++k) {
    const Bundle& x = lat.point(k);
    Rat u = b.valuation.at_index(k);
    for (int j = 0; j < inst.m(); ++j)
      if (x[j]) u -= unit[j] * x[j];
    if (out.full.empty() || u > out.best) {
      out.best = u;
      out.full.assign(1, k);
    } else if (u == out.best) {
      out.full.push_back(k);
    }
  }
  return out;
}

bool leq(const Bundle& a, const Bundle& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

std::vector<Bundle> extremal(const std::vector<Bundle>& fam, bool minimal) {
  std::vector<Bundle> out;
  for (const auto& x : fam) {
    bool keep = true;
    for (const auto& y : fam) {
      if (y == x) continue;
      if (minimal ? leq(y, x) : leq(x, y)) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(x);
  }
  return out;
}

}  // namespace

DemandFamily demand(const MarketInstance& inst, int i, const PriceVector& p, DemandKind kind) {
  auto bd = demand_indices(inst, i, p);
  std::vector<Bundle> fam;
  for (auto k : bd.full) fam.push_back(inst.lattice().point(k));
  if (kind != DemandKind::full) fam = extremal(fam, kind == DemandKind::minimal);
  return DemandFamily{std::move(fam), kind};
}

RankOracle rank_of_demand(const DemandFamily& family, int m) {
  if (family.kind == DemandKind::full)
    throw InvalidInput("rank_of_demand needs a minimal or maximal family");
  if (!is_m_convex(family.bundles))
    throw InternalError("demand family is not M-convex");
  return rank_of_family(m, family.bundles);
}

DemandSnapshot snapshot(const MarketInstance& inst, const PriceVector& p) {
  validate_price(inst, p);
  DemandSnapshot s;
  s.price = p;
  for (int i = 0; i < inst.n(); ++i) {
    auto bd = demand_indices(inst, i, p);
    std::vector<Bundle> fam;
    for (auto k : bd.full) fam.push_back(inst.lattice().point(k));
    s.minimal.push_back({extremal(fam, true), DemandKind::minimal});
    s.maximal.push_back({extremal(fam, false), DemandKind::maximal});
    s.check_rank.push_back(rank_of_demand(s.minimal.back(), inst.m()));
    s.hat_rank.push_back(rank_of_demand(s.maximal.back(), inst.m()));
    s.full.push_back(std::move(bd.full));
    s.best_utility.push_back(bd.best);
    std::vector<Rat> sl;
    for (int j = 0; j < inst.m(); ++j) sl.push_back(inst.buyer(i).payments[j].right_slope(p[j]));
    s.slopes.push_back(std::move(sl));
  }
  return s;
}

int requirement(const DemandSnapshot& snap, int i, Mask x) {
  const RankOracle& r = snap.check_rank.at(i);
  const Mask all = full_mask(r.universe());
  int direct = -1;
  for (const auto& b : snap.minimal[i].bundles) {
    int v = sum_over(b, x);
    if (direct < 0 || v < direct) direct = v;
  }
  int via_rank = r.rank(all) - r.rank(all & ~x);
  if (direct != via_rank)
    throw InternalError("requirement mismatch: min over family " + std::to_string(direct) +
                        " vs rank formula " + std::to_string(via_rank));
  return direct;
}

int requirement(const MarketInstance& inst, int i, Mask x, const PriceVector& p) {
  return requirement(snapshot(inst, p), i, x);
}

int overdemand(const MarketInstance& inst, const DemandSnapshot& snap, Mask x) {
  int mu = 0;
  for (int i = 0; i < inst.n(); ++i) mu += requirement(snap, i, x);
  return mu - sum_over(inst.supply(), x);
}

int overdemand(const MarketInstance& inst, Mask x, const PriceVector& p) {
  return overdemand(inst, snapshot(inst, p), x);
}

int underdemand(const MarketInstance& inst, const DemandSnapshot& snap, Mask x) {
  int r = 0;
  for (int i = 0; i < inst.n(); ++i) r += snap.hat_rank[i].rank(x);
  return r - sum_over(inst.supply(), x);
}

int underdemand(const MarketInstance& inst, Mask x, const PriceVector& p) {
  return underdemand(inst, snapshot(inst, p), x);
}

Mask minimal_minimizer(const std::vector<RankOracle>& ranks, const Bundle& supply) {
  const int m = static_cast<int>(supply.size());
  const Mask all = full_mask(m);
  auto objective = [&](Mask x) {
    int v = sum_over(supply, x);
    for (const auto& r : ranks) v += r.rank(all & ~x);
    return v;
  };
  int best = objective(0);
  for (Mask x = 1; x <= all; ++x) best = std::min(best, objective(x));
  Mask meet = all;
  for (Mask x = 0; x <= all; ++x)
    if (objective(x) == best) meet &= x;
  if (objective(meet) != best)
    throw InternalError("minimizers of the dual objective are not closed under intersection");
  return meet;
}

Mask minimal_overdemanded_set(const MarketInstance& inst, const PriceVector& p) {
  return minimal_minimizer(snapshot(inst, p).check_rank, inst.supply());
}

EquilibriumCheck is_equilibrium_price(const MarketInstance& inst, const DemandSnapshot& snap) {
  const Mask all = full_mask(inst.m());
  for (Mask x = 1; x <= all; ++x) {
    if (overdemand(inst, snap, x) > 0)
      return {false, x, EquilibriumCheck::Failure::overdemanded};
    if (underdemand(inst, snap, x) < 0)
      return {false, x, EquilibriumCheck::Failure::underdemanded};
  }
  return {};
}

EquilibriumCheck is_equilibrium_price(const MarketInstance& inst, const PriceVector& p) {
  return is_equilibrium_price(inst, snapshot(inst, p));
}

}  // namespace walras
