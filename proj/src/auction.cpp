#include "walras/auction.hpp"

#include <array>

namespace walras {

namespace {

constexpr std::array<const char*, 7> kEventNames = {
    "slope_breakpoint",     "demand_change",         "xstar_change", "overdemand_decrease",
    "dual_value_increase",  "dual_minimal_increase", "termination"};

bool weakly_above(const std::vector<LexScalar>& a, const std::vector<LexScalar>& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] < b[j]) return false;
  return true;
}

}  // namespace

std::string to_string(EventKind k) { return kEventNames.at(static_cast<std::size_t>(k)); }

EventKind parse_event_kind(const std::string& s) {
  for (std::size_t k = 0; k < kEventNames.size(); ++k)
    if (s == kEventNames[k]) return static_cast<EventKind>(k);
  throw InvalidInput("unknown event kind '" + s + "'");
}

RayEvent ray_event(const MarketInstance& inst, const PriceVector& p, const Direction& d) {
  validate_price(inst, p);
  const int m = inst.m();
  if (static_cast<int>(d.d.size()) != m) throw InvalidInput("direction size mismatch");
  for (const auto& dj : d.d)
    if (sgn(dj) < 0) throw InvalidInput("direction must be nonnegative");

  std::optional<Rat> bp_step;
  for (int j = 0; j < m; ++j) {
    if (sgn(d.d[j]) == 0) continue;
    for (const auto& b : inst.buyers()) {
      auto nb = b.payments[j].next_breakpoint(p[j]);
      if (!nb) continue;
      Rat e = (*nb - p[j]) / d.d[j];
      if (!bp_step || e < *bp_step) bp_step = e;
    }
  }

  std::optional<Rat> tie_step;
  const Lattice& lat = inst.lattice();
  for (int i = 0; i < inst.n(); ++i) {
    const Buyer& b = inst.buyer(i);
    std::vector<Rat> unit(m), rate_j(m);
    for (int j = 0; j < m; ++j) {
      unit[j] = b.payments[j].at(p[j]);
      rate_j[j] = b.payments[j].right_slope(p[j]) * d.d[j];
    }
    std::vector<Rat> u(lat.size()), r(lat.size());
    std::optional<Rat> umax;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      const Bundle& x = lat.point(k);
      u[k] = b.valuation.at_index(k);
      for (int j = 0; j < m; ++j)
        if (x[j]) {
          u[k] -= unit[j] * x[j];
          r[k] += rate_j[j] * x[j];
        }
      if (!umax || u[k] > *umax) umax = u[k];
    }
    std::optional<Rat> rmin;
    for (std::size_t k = 0; k < lat.size(); ++k)
      if (u[k] == *umax && (!rmin || r[k] < *rmin)) rmin = r[k];
    for (std::size_t k = 0; k < lat.size(); ++k) {
      if (!(r[k] < *rmin)) continue;
      Rat e = (*umax - u[k]) / (*rmin - r[k]);
      if (!tie_step || e < *tie_step) tie_step = e;
    }
  }

  if (bp_step && (!tie_step || *bp_step <= *tie_step)) return {bp_step, EventKind::slope_breakpoint};
  if (tie_step) return {tie_step, EventKind::demand_change};
  return {};
}

RayEvent next_event(const MarketInstance& inst, const PriceVector& p, const Direction& d) {
  if (d.support == 0) throw InvalidInput("next_event needs a nonzero direction");
  RayEvent ev = ray_event(inst, p, d);
  if (!ev.step)
    throw ModelViolation("prices rise forever along the direction while goods stay over-demanded");
  return ev;
}

SolverState solver_state(const MarketInstance& inst, const PriceVector& p, DirectionPolicy policy) {
  SolverState s;
  s.policy = policy;
  s.price = p;
  s.snap = snapshot(inst, p);
  s.input = direction_input(inst, s.snap);
  s.dual = compute_direction(s.input);
  if (policy == DirectionPolicy::separable && s.dual.xstar)
    s.direction = separable_direction(s.snap.slopes, s.dual.xstar);
  else
    s.direction = s.dual.direction;
  s.overdemand = overdemand(inst, s.snap, s.dual.xstar);
  return s;
}

EventKind classify_event(const MarketInstance& inst, const SolverState& before,
                         const SolverState& after) {
  if (before.dual.xstar != after.dual.xstar) return EventKind::xstar_change;
  if (before.snap.slopes != after.snap.slopes) return EventKind::slope_breakpoint;
  if (overdemand(inst, after.snap, before.dual.xstar) < before.overdemand)
    return EventKind::overdemand_decrease;
  if (after.policy == DirectionPolicy::separable && after.direction == before.direction)
    return EventKind::demand_change;
  const auto& v0 = before.dual.dual_value;
  const auto& v1 = after.dual.dual_value;
  if (v1 > v0) return EventKind::dual_value_increase;
  if (v1 == v0) {
    const auto& z0 = before.dual.dual.z;
    const auto& z1 = after.dual.dual.z;
    if (z1 != z0 && weakly_above(z1, z0)) return EventKind::dual_minimal_increase;
    if (after.direction == before.direction) return EventKind::demand_change;
  }
  throw InternalError("event at price matches no known case: dual " + v0.str() + " -> " + v1.str());
}

long default_iteration_cap(const MarketInstance& inst) {
  return 10L * inst.total_supply() * (inst.m() + 1) * inst.n() * (inst.total_breakpoints() + 1);
}

AuctionTrace run_auction(const MarketInstance& inst, const AuctionOptions& opts) {
  const long cap = opts.cap ? *opts.cap : default_iteration_cap(inst);
  const int m = inst.m();
  AuctionTrace trace;
  PriceVector p(m, Rat(0));
  SolverState state = solver_state(inst, p, opts.policy);
  auto base_record = [&](const SolverState& s) {
    IterationRecord rec;
    rec.price_before = s.price;
    rec.xstar = s.dual.xstar;
    rec.direction = s.direction;
    rec.dual_value = s.dual.dual_value;
    rec.z = s.dual.dual.z;
    rec.theta = (m + 1) * s.overdemand - popcount(s.dual.xstar);
    return rec;
  };

  while (true) {
    if (state.dual.xstar == 0) {
      IterationRecord rec = base_record(state);
      rec.step = 0;
      trace.iterations.push_back(rec);
      break;
    }
    if (static_cast<long>(trace.iterations.size()) >= cap) {
      trace.final_price = p;
      throw IterationCapExceeded("iteration cap " + std::to_string(cap) + " exceeded", trace);
    }
    const RayEvent ev = next_event(inst, p, state.direction);
    PriceVector q = p;
    for (int j = 0; j < m; ++j) q[j] += *ev.step * state.direction.d[j];
    SolverState next = solver_state(inst, q, opts.policy);

    IterationRecord rec = base_record(state);
    rec.step = *ev.step;
    rec.stop = ev.kind;
    rec.event = classify_event(inst, state, next);
    if (rec.event != EventKind::xstar_change)
      rec.direction_kept = lsc_certificate(next.input, next.dual.xstar, state.direction).ok;
    trace.iterations.push_back(rec);
    p = q;
    state = std::move(next);
  }
  trace.final_price = p;
  if (!is_equilibrium_price(inst, state.snap).ok)
    throw InternalError("auction stopped at a price that is not an equilibrium");
  return trace;
}

}  // namespace walras
