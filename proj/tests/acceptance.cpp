// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "walras/allocation.hpp"
#include "walras/auction.hpp"
#include "walras/checks.hpp"
#include "walras/direction.hpp"
#include "walras/io.hpp"
#include "walras/lyapunov.hpp"
#include "walras/oracle.hpp"

using namespace walras;
using walras::testing::prices;

namespace {

// Pinned limits. Arithmetic is exact, so every equality tolerance is zero.
constexpr double kGoldenSeconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kPropertySeconds = 300.0;
constexpr int kOracleInstances = 200;
constexpr int kPropertyInstances = 200;
constexpr int kPricePairs = 500;
constexpr int kSeparableInstances = 120;
constexpr int kDerivativeSamples = 100;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Failure {
  std::string what;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure{what};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string show(const PriceVector& p) {
  std::string s = "(";
  for (std::size_t j = 0; j < p.size(); ++j) s += (j ? "," : "") + to_string(p[j]);
  return s + ")";
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(3);
  os << s << "s";
  return os.str();
}

// Criterion 1: rank table, X*, dual minimum and both perturbed tables.
Outcome three_good_golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const DirectionInput in = walras::testing::load_fixture("lsc_counterexample.json").families->input();
  const std::vector<Mask> cols{0, 1, 2, 4, 3, 6, 5, 7};
  const std::vector<std::vector<int>> rows{{0, 1, 1, 1, 1, 2, 2, 2}, {0, 0, 1, 1, 1, 2, 1, 2}, {0, 0, 1, 1, 1, 1, 1, 1}};
  const std::vector<int> objective{5, 6, 5, 4, 5, 3, 5, 3};
  int minimum = 1 << 20;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    int obj = sum_over(in.supply, cols[c]);
    for (int i = 0; i < 3; ++i) {
      require(in.ranks[i].rank(cols[c]) == rows[i][c], "rank table entry differs");
      obj += in.ranks[i].rank(7 & ~cols[c]);
    }
    require(obj == objective[c], "objective row differs");
    minimum = std::min(minimum, obj);
  }
  require(minimum == 3, "dual minimum is not 3");
  const DirectionResult r = compute_direction(in);
  require(r.xstar == 0b110, "X* is not {2,3}");

  const Direction d1{prices({"0", "1", "1"}), 0b110}, d2{prices({"0", "1", "2"}), 0b110};
  const auto pa = perturbed_ranks(in, 0b110, d1);
  const auto ta = perturbed_table(pa, 0b110, in.supply);
  require(ta.buyer_rows == std::vector<std::vector<int>>{{0, 0, 1, 1}, {0, 1, 1, 2}, {0, 0, 1, 1}},
          "perturbed ranks under (0,1,1) differ");
  require(ta.objective == std::vector<int>{4, 4, 2, 2}, "perturbed objective under (0,1,1) differs");
  const Certificate ca = lsc_certificate(pa, 0b110, in.supply);
  require(!ca.ok && ca.witness == 0b100, "(0,1,1) not rejected with minimizer {3}");
  const auto pb = perturbed_ranks(in, 0b110, d2);
  const auto tb = perturbed_table(pb, 0b110, in.supply);
  require(tb.buyer_rows == std::vector<std::vector<int>>{{0, 0, 1, 1}, {0, 1, 1, 2}, {0, 1, 1, 1}},
          "perturbed ranks under (0,1,2) differ");
  require(tb.objective == std::vector<int>{4, 4, 3, 2}, "perturbed objective under (0,1,2) differs");
  require(lsc_certificate(pb, 0b110, in.supply).ok, "(0,1,2) rejected");
  const double dt = seconds_since(t0);
  require(dt < kGoldenSeconds, "took " + fmt_seconds(dt));
  return {true, "rank table, X*={2,3}, minimum 3, (0,1,1) rejected at {3}, (0,1,2) accepted in " + fmt_seconds(dt)};
}

// Criterion 2: the two-good frictional trajectory.
Outcome frictional_trajectory_golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const MarketInstance inst = walras::testing::load_market_fixture("frictional_trajectory.json");
  const AuctionTrace t = run_auction(inst);
  require(t.iterations.size() >= 3, "trace too short");
  const auto& it = t.iterations;
  require(it[0].price_before == prices({"0", "0"}) && it[0].direction.d == prices({"1/2", "1/2"}), "d0 differs");
  require(it[1].price_before == prices({"1", "1"}) && it[0].event == EventKind::dual_value_increase,
          "event at (1,1) is not a dual value increase");
  require(it[1].direction.d == prices({"1/2", "1/8"}), "d1 differs");
  require(it[2].price_before == prices({"3/2", "9/8"}) && it[1].event == EventKind::dual_minimal_increase,
          "event at (3/2,9/8) is not a minimal dual increase");
  require(it[2].direction.d == prices({"1/2", "5/8"}), "d2 differs");
  require(it[0].dual_value == LexScalar(Rat(2), Rat(1, 2)) && it[1].dual_value == LexScalar(Rat(2), Rat(2)) &&
              it[2].dual_value == LexScalar(Rat(2), Rat(2)),
          "dual values differ");
  const double dt = seconds_since(t0);
  require(dt < kGoldenSeconds, "took " + fmt_seconds(dt));
  return {true, "d0, d1, d2, both event kinds and dual values match, final " + show(t.final_price) + " in " +
                    fmt_seconds(dt)};
}

// Criterion 3: translation sums with unit and scaled shifts.
Outcome translation_golden() {
  const MarketInstance inst = walras::testing::load_market_fixture("scaled_potential.json");
  const auto fr = detect_separable(inst);
  require(fr && fr->beta_vector(prices({"0", "0"})) == prices({"1", "2"}), "beta is not (1,2)");
  const auto p = prices({"0.5", "0.2"}), pp = prices({"0", "0.1"});
  const TranslationSums unit = translation_sums(inst, *fr, p, pp, Rat(1, 10), prices({"1", "1"}));
  require(unit.original == Rat(28, 5), "L(p)+L(p') = " + to_string(unit.original));
  require(unit.shifted == Rat(57, 10), "shifted sum = " + to_string(unit.shifted));
  require(!unit.holds(), "unit shift unexpectedly satisfies the inequality");
  const TranslationSums scaled = translation_sums(inst, *fr, p, pp, Rat(1, 10), prices({"1", "1/2"}));
  require(scaled.holds(), "scaled shift fails: " + to_string(scaled.original) + " < " + to_string(scaled.shifted));
  return {true, "28/5 < 57/10 under the unit shift; " + to_string(scaled.original) + " >= " +
                    to_string(scaled.shifted) + " under (1,1/2)"};
}

// Criterion 4: two directions pass at the origin.
Outcome non_unique_direction_golden() {
  const MarketInstance inst = walras::testing::load_market_fixture("two_bidder_symmetric.json");
  const DemandSnapshot snap = snapshot(inst, prices({"0", "0"}));
  const DirectionInput in = direction_input(inst, snap);
  const Mask xstar = minimal_overdemanded_set(inst, prices({"0", "0"}));
  require(xstar == 0b11, "X* is not {1,2}");
  require(lsc_certificate(in, xstar, Direction{prices({"1", "1"}), 0b11}).ok, "(1,1) rejected");
  require(lsc_certificate(in, xstar, Direction{prices({"1", "2"}), 0b11}).ok, "(1,2) rejected");
  return {true, "(1,1) and (1,2) both certified at p = 0"};
}

// Criterion 5: frictionless final price equals the brute-force minimum.
Outcome frictionless_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(20260501);
  walras::testing::GenParams g;
  for (int k = 0; k < kOracleInstances; ++k) {
    const MarketInstance inst = walras::testing::random_instance(rng, g);
    const PriceVector a = run_auction(inst).final_price;
    const PriceVector b = brute_minimum_equilibrium_frictionless(inst);
    require(a == b, "instance " + std::to_string(k) + ": auction " + show(a) + ", oracle " + show(b));
  }
  const double dt = seconds_since(t0);
  require(dt < kOracleSeconds, "took " + fmt_seconds(dt));
  return {true, std::to_string(kOracleInstances) + " instances agree in " + fmt_seconds(dt)};
}

std::vector<MarketInstance> frictional_corpus() {
  std::mt19937 rng(20260502);
  walras::testing::GenParams g;
  g.payments = walras::testing::GenParams::Payments::frictional;
  std::vector<MarketInstance> out;
  for (int k = 0; k < kPropertyInstances; ++k) out.push_back(walras::testing::random_instance(rng, g));
  return out;
}

// Maximizers of O(.;p) by enumerating the full demand sets directly.
Mask xstar_by_enumeration(const MarketInstance& inst, const DemandSnapshot& snap) {
  const Mask all = full_mask(inst.m());
  int best = 0;
  Mask meet = all;
  for (Mask x = 0; x <= all; ++x) {
    int o = -sum_over(inst.supply(), x);
    for (int i = 0; i < inst.n(); ++i) {
      int lo = 1 << 20;
      for (auto k : snap.full[i]) lo = std::min(lo, sum_over(inst.lattice().point(k), x));
      o += lo;
    }
    if (o > best) {
      best = o;
      meet = x;
    } else if (o == best && best > 0) {
      meet &= x;
    }
  }
  return best > 0 ? meet : 0;
}

// Returns the number of records with X* nonempty.
int property_suite_one(const MarketInstance& inst, int idx) {
  const std::string tag = "instance " + std::to_string(idx) + ": ";
  const AuctionTrace t = run_auction(inst);
  long changes = 0;
  int active = 0;
  for (std::size_t k = 0; k < t.iterations.size(); ++k) {
    const auto& rec = t.iterations[k];
    const DemandSnapshot snap = snapshot(inst, rec.price_before);
    const std::string at = tag + "at " + show(rec.price_before) + ": ";
    require(max_underdemand(inst, snap).first <= 0, at + "under-demanded set");
    const DirectionInput in = direction_input(inst, snap);
    const DirectionResult r = compute_direction(in);
    require(r.xstar == rec.xstar, at + "X* not reproduced");
    require(xstar_by_reachability(r.graph) == xstar_by_enumeration(inst, snap), at + "reachability X* differs");
    require(eval_dual_objective(in.ranks, in.supply, r.w, r.z_full) == r.primal.value, at + "duality gap");
    require(brute_p2_optimum(in.ranks, in.supply, r.w).value == r.primal.value, at + "primal not optimal");
    if (rec.xstar == 0) continue;
    ++active;
    require(lsc_certificate(in, rec.xstar, rec.direction).ok, at + "direction fails the certificate");
    for (int j : elements(rec.xstar)) require(rec.z[j].base() == 1, at + "dual base tier is not 1 on X*");
    if (k + 1 < t.iterations.size() && t.iterations[k + 1].xstar != rec.xstar) {
      ++changes;
      require(t.iterations[k + 1].theta < rec.theta, at + "theta did not decrease");
    }
  }
  require(changes <= static_cast<long>(inst.total_supply()) * (inst.m() + 1) * inst.n(), tag + "too many X* changes");
  require(is_equilibrium_price(inst, t.final_price).ok, tag + "final price does not clear");
  const auto all = brute_equilibrium_allocations(inst, t.final_price);
  require(!all.empty(), tag + "no clearing allocation at the final price");
  const auto x = compute_allocation(inst, t.final_price, AllocationMode::capacity);
  require(std::find(all.begin(), all.end(), x) != all.end(), tag + "allocation not in the brute-force set");
  return active;
}

// Criterion 6.
Outcome property_suite(const std::vector<MarketInstance>& corpus) {
  const auto t0 = std::chrono::steady_clock::now();
  int active = 0;
  for (std::size_t k = 0; k < corpus.size(); ++k) active += property_suite_one(corpus[k], static_cast<int>(k));
  const double dt = seconds_since(t0);
  require(dt < kPropertySeconds, "took " + fmt_seconds(dt));
  return {true, std::to_string(corpus.size()) + " frictional runs (" + std::to_string(active) +
                    " price updates) satisfy every invariant in " + fmt_seconds(dt)};
}

// Criterion 7.
Outcome demand_structure(const std::vector<MarketInstance>& corpus) {
  std::mt19937 rng(20260503);
  int pairs = 0, swaps = 0;
  for (std::size_t k = 0; pairs < kPricePairs || k < corpus.size(); ++k) {
    const MarketInstance& inst = corpus[k % corpus.size()];
    PriceVector p(inst.m()), pp(inst.m());
    for (int j = 0; j < inst.m(); ++j) {
      p[j] = rat(walras::testing::uniform(rng, 0, 16), 2);
      pp[j] = walras::testing::uniform(rng, 0, 2) == 0 ? p[j] : p[j] + rat(walras::testing::uniform(rng, 1, 8), 4);
    }
    const std::string at = "pair " + show(p) + " <= " + show(pp) + ": ";
    if (auto e = check_gs_lad(inst, p, pp)) require(false, at + *e);
    if (auto e = check_rank_monotonicity(inst, p, pp)) require(false, at + *e);
    for (const auto& q : {p, pp}) {
      if (auto e = check_swap_existence(inst, q)) require(false, "at " + show(q) + ": " + *e);
      ++swaps;
    }
    ++pairs;
  }
  return {true, std::to_string(pairs) + " price pairs, " + std::to_string(swaps) + " exhaustive swap checks"};
}

// Criterion 8.
Outcome separable_suite() {
  std::mt19937 rng(20260504);
  walras::testing::GenParams g;
  g.payments = walras::testing::GenParams::Payments::separable;
  int records = 0, event_b = 0, samples = 0;
  for (int k = 0; k < kSeparableInstances || samples < kDerivativeSamples; ++k) {
    const MarketInstance inst = walras::testing::random_instance(rng, g);
    const std::string tag = "instance " + std::to_string(k) + ": ";
    const auto fr = detect_separable(inst);
    require(fr && fr->price_independent(), tag + "generator produced non-separable frictions");
    const AuctionTrace t = run_auction(inst, {std::nullopt, DirectionPolicy::separable});
    for (std::size_t r = 0; r < t.iterations.size(); ++r) {
      const auto& rec = t.iterations[r];
      if (rec.xstar == 0) continue;
      ++records;
      const PriceVector& p = rec.price_before;
      const DirectionInput in = direction_input(inst, snapshot(inst, p));
      require(rec.direction == separable_direction(fr->beta_vector(p), rec.xstar), tag + "direction is not 1/beta");
      require(lsc_certificate(in, rec.xstar, rec.direction).ok, tag + "separable direction fails the certificate");
      if (r + 1 < t.iterations.size()) {
        const auto& next = t.iterations[r + 1];
        if (next.xstar == rec.xstar && !rec.direction_kept) {
          ++event_b;
          require(rec.event == EventKind::slope_breakpoint, tag + "direction change without a breakpoint");
        }
        require(eval_scaled_lyapunov(inst, *fr, next.price_before) < eval_scaled_lyapunov(inst, *fr, p),
                tag + "scaled potential did not decrease after " + show(p));
      }
      for (Mask x = 1; x <= full_mask(inst.m()); ++x) {
        require(directional_derivative(inst, *fr, p, x) == -overdemand(inst, x, p),
                tag + "derivative differs from -O at " + show(p));
        ++samples;
      }
    }
  }
  return {true, std::to_string(records) + " separable records certified, " + std::to_string(event_b) +
                    " direction changes with X* fixed, " + std::to_string(samples) + " derivative samples"};
}

}  // namespace

int main() {
  std::vector<MarketInstance> corpus;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"three-good direction golden", three_good_golden},
      {"frictional trajectory golden", frictional_trajectory_golden},
      {"translation submodularity golden", translation_golden},
      {"non-unique direction golden", non_unique_direction_golden},
      {"frictionless oracle equivalence", frictionless_oracle},
      {"frictional property suite",
       [&] {
         corpus = frictional_corpus();
         return property_suite(corpus);
       }},
      {"demand-structure suite",
       [&] {
         if (corpus.empty()) corpus = frictional_corpus();
         return demand_structure(corpus);
       }},
      {"separable suite", separable_suite},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const Failure& f) {
      o = {false, f.what};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << c + 1 << " (" << criteria[c].first << "): " << o.detail
              << std::endl;
  }
  return failed;
}
