#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "walras/direction.hpp"
#include "walras/market.hpp"

namespace walras {

// overdemand_decrease covers the case where O(X*) drops while X* and the
// slopes stay put.
enum class EventKind {
  slope_breakpoint,
  demand_change,
  xstar_change,
  overdemand_decrease,
  dual_value_increase,
  dual_minimal_increase,
  termination
};

std::string to_string(EventKind k);
EventKind parse_event_kind(const std::string& s);

enum class DirectionPolicy { lexicographic_dual, separable };

struct RayEvent {
  std::optional<Rat> step;  // nullopt: nothing happens along the ray
  EventKind kind = EventKind::slope_breakpoint;
};

// First breakpoint or demand tie along p + eps*d, eps > 0.
RayEvent ray_event(const MarketInstance& inst, const PriceVector& p, const Direction& d);
// Same, but an unbounded ray is a ModelViolation.
RayEvent next_event(const MarketInstance& inst, const PriceVector& p, const Direction& d);

struct SolverState {
  DirectionPolicy policy = DirectionPolicy::lexicographic_dual;
  PriceVector price;
  DemandSnapshot snap;
  DirectionInput input;
  DirectionResult dual;
  Direction direction;
  int overdemand = 0;  // O(X*; price)
};

SolverState solver_state(const MarketInstance& inst, const PriceVector& p,
                         DirectionPolicy policy = DirectionPolicy::lexicographic_dual);

EventKind classify_event(const MarketInstance& inst, const SolverState& before,
                         const SolverState& after);

struct IterationRecord {
  PriceVector price_before;
  Mask xstar = 0;
  Direction direction;
  LexScalar dual_value;
  std::vector<LexScalar> z;
  Rat step;
  EventKind stop = EventKind::termination;   // what ended the ray
  EventKind event = EventKind::termination;  // what changed at the new price
  bool direction_kept = true;                // old direction still passes LSC there
  int theta = 0;
};

struct AuctionTrace {
  std::vector<IterationRecord> iterations;
  PriceVector final_price;
};

struct AuctionOptions {
  std::optional<long> cap;
  DirectionPolicy policy = DirectionPolicy::lexicographic_dual;
};

struct IterationCapExceeded : std::runtime_error {
  IterationCapExceeded(const std::string& msg, AuctionTrace t)
      : std::runtime_error(msg), trace(std::move(t)) {}
  AuctionTrace trace;
};

long default_iteration_cap(const MarketInstance& inst);

AuctionTrace run_auction(const MarketInstance& inst, const AuctionOptions& opts = {});

}  // namespace walras
