// walras: solve, trace and verify markets from JSON instance files.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "walras/allocation.hpp"
#include "walras/auction.hpp"
#include "walras/checks.hpp"
#include "walras/direction.hpp"
#include "walras/io.hpp"
#include "walras/oracle.hpp"

using namespace walras;
using io::Json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInput = 2, kCap = 3, kCounterexample = 4, kSupport = 5 };

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string format = "table";
  std::optional<long> cap;
  OracleBudget budget;
};

std::string show_price(const PriceVector& p) {
  std::string s;
  for (const auto& x : p) s += (s.empty() ? "" : " ") + to_string(x);
  return s;
}

std::string show_set(Mask x) {
  std::string s = "{";
  for (int j : elements(x)) s += (s.size() > 1 ? "," : "") + std::to_string(j + 1);
  return s + "}";
}

std::string show_lex(const LexScalar& v) { return "(" + to_string(v.base()) + ", " + to_string(v.logarg()) + ")"; }

MarketInstance require_market(const io::InputFile& in) {
  if (!in.market) throw InvalidInput("file holds demand families only; use certify-direction");
  return *in.market;
}

void check_budget(const MarketInstance& inst, const OracleBudget& b) {
  if (inst.lattice().size() > b.max_lattice_points)
    throw BudgetExceeded("max_lattice_points budget exceeded: needs " +
                         std::to_string(inst.lattice().size()) + ", limit " +
                         std::to_string(b.max_lattice_points));
}

AuctionOptions auction_options(const RunConfig& cfg) {
  AuctionOptions o;
  o.cap = cfg.cap;
  return o;
}

long counted_iterations(const AuctionTrace& t) {
  long k = 0;
  for (const auto& r : t.iterations) k += r.event != EventKind::termination;
  return k;
}

int cmd_solve(const RunConfig& cfg) {
  const MarketInstance inst = require_market(io::load_input(cfg.input_path));
  check_budget(inst, cfg.budget);
  const AuctionTrace t = run_auction(inst, auction_options(cfg));
  const auto x = compute_allocation(inst, t.final_price);
  if (cfg.format == "json") {
    std::cout << Json{{"final_price", io::price_json(t.final_price)},
                      {"allocation", io::allocation_json(x)},
                      {"iterations", counted_iterations(t)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "price: " << show_price(t.final_price) << "\n";
    std::cout << "allocation:\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::cout << "  buyer " << i + 1 << ":";
      for (int v : x[i]) std::cout << " " << v;
      std::cout << "\n";
    }
    std::cout << "iterations: " << counted_iterations(t) << "\n";
  }
  return kOk;
}

int cmd_trace(const RunConfig& cfg) {
  const MarketInstance inst = require_market(io::load_input(cfg.input_path));
  check_budget(inst, cfg.budget);
  const AuctionTrace t = run_auction(inst, auction_options(cfg));
  for (const auto& r : t.iterations) {
    if (cfg.format == "json") {
      std::cout << io::record_json(r).dump() << "\n";
      continue;
    }
    std::string d;
    for (const auto& v : r.direction.d) d += (d.empty() ? "" : " ") + to_string(v);
    std::cout << "p=[" << show_price(r.price_before) << "] X*=" << show_set(r.xstar) << " d=[" << d
              << "] dual=" << show_lex(r.dual_value) << " step=" << to_string(r.step)
              << " event=" << to_string(r.event) << " theta=" << r.theta << "\n";
  }
  return kOk;
}

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

std::vector<CheckResult> verify_checks(const MarketInstance& inst, const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const AuctionTrace t = run_auction(inst, auction_options(cfg));
  std::vector<PriceVector> prices;
  for (const auto& r : t.iterations) prices.push_back(r.price_before);

  auto run = [&](const std::string& name, const std::function<std::optional<std::string>()>& f) {
    auto bad = f();
    out.push_back({name, !bad, bad ? *bad : ""});
  };

  run("demand_substitutes", [&]() -> std::optional<std::string> {
    for (std::size_t k = 0; k + 1 < prices.size(); ++k)
      if (auto e = check_gs_lad(inst, prices[k], prices[k + 1])) return *e;
    for (const auto& p : prices)
      if (auto e = check_gs_lad(inst, p, p)) return *e;
    return std::nullopt;
  });
  run("rank_monotonicity", [&]() -> std::optional<std::string> {
    for (std::size_t k = 0; k + 1 < prices.size(); ++k)
      if (auto e = check_rank_monotonicity(inst, prices[k], prices[k + 1])) return *e;
    return std::nullopt;
  });
  run("swap_existence", [&]() -> std::optional<std::string> {
    for (const auto& p : prices)
      if (auto e = check_swap_existence(inst, p)) return *e;
    return std::nullopt;
  });
  run("final_equilibrium", [&]() -> std::optional<std::string> {
    auto c = is_equilibrium_price(inst, t.final_price);
    if (c.ok) return std::nullopt;
    return "set " + show_set(c.witness) + " violates clearing at the final price";
  });
  run("duality", [&]() -> std::optional<std::string> {
    for (const auto& p : prices) {
      const DemandSnapshot snap = snapshot(inst, p);
      const DirectionInput in = direction_input(inst, snap);
      const DirectionResult r = compute_direction(in);
      if (!(r.dual_value == r.primal.value)) return "primal and dual values differ at " + show_price(p);
      const P2Optimum brute = brute_p2_optimum(in.ranks, in.supply, r.w, cfg.budget);
      if (!(brute.value == r.primal.value))
        return "primal value " + show_lex(r.primal.value) + " but enumeration gives " +
               show_lex(brute.value) + " at " + show_price(p);
      for (int j : elements(r.xstar))
        if (r.z_full[j].base() != 1) return "dual base tier is not 1 on X* at " + show_price(p);
    }
    return std::nullopt;
  });
  run("direction_certificate", [&]() -> std::optional<std::string> {
    for (const auto& r : t.iterations) {
      if (r.xstar == 0) continue;
      const DemandSnapshot snap = snapshot(inst, r.price_before);
      auto c = lsc_certificate(direction_input(inst, snap), r.xstar, r.direction);
      if (!c.ok)
        return "direction at " + show_price(r.price_before) + " shrinks X* to " + show_set(c.witness);
    }
    return std::nullopt;
  });
  run("no_underdemand", [&]() -> std::optional<std::string> {
    for (const auto& p : prices) {
      auto [u, x] = max_underdemand(inst, snapshot(inst, p));
      if (u > 0) return "set " + show_set(x) + " under-demanded at " + show_price(p);
    }
    return std::nullopt;
  });
  run("theta_decrease", [&]() -> std::optional<std::string> {
    long changes = 0;
    for (std::size_t k = 0; k + 1 < t.iterations.size(); ++k) {
      const auto& a = t.iterations[k];
      const auto& b = t.iterations[k + 1];
      if (a.xstar == b.xstar) continue;
      ++changes;
      if (!(b.theta < a.theta))
        return "theta " + std::to_string(a.theta) + " -> " + std::to_string(b.theta) + " at " +
               show_price(b.price_before);
    }
    const long bound = static_cast<long>(inst.total_supply()) * (inst.m() + 1) * inst.n();
    if (changes > bound) return std::to_string(changes) + " X* changes exceed " + std::to_string(bound);
    return std::nullopt;
  });
  run("allocation", [&]() -> std::optional<std::string> {
    const auto x = compute_allocation(inst, t.final_price, AllocationMode::capacity);
    const auto all = brute_equilibrium_allocations(inst, t.final_price, cfg.budget);
    if (std::find(all.begin(), all.end(), x) == all.end())
      return "allocation " + io::allocation_json(x).dump() + " is not a clearing allocation";
    return std::nullopt;
  });
  return out;
}

int cmd_verify(const RunConfig& cfg) {
  const MarketInstance inst = require_market(io::load_input(cfg.input_path));
  check_budget(inst, cfg.budget);
  const auto checks = verify_checks(inst, cfg);
  bool all_ok = true;
  Json report = Json::array();
  for (const auto& c : checks) {
    all_ok = all_ok && c.ok;
    report.push_back(Json{{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    if (cfg.format != "json") std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << (c.ok ? "" : ": " + c.detail) << "\n";
  }
  if (cfg.format == "json") std::cout << Json{{"checks", report}}.dump(2) << "\n";
  if (all_ok) return kOk;
  for (const auto& c : checks)
    if (!c.ok) {
      std::cerr << Json{{"check", c.name}, {"counterexample", c.detail}}.dump() << "\n";
      break;
    }
  return kCounterexample;
}

int cmd_certify(const RunConfig& cfg) {
  const io::InputFile in = io::load_input(cfg.input_path);
  if (!in.direction) throw InvalidInput("certify-direction needs a 'direction' field");
  DirectionInput din;
  if (in.families) {
    din = in.families->input();
  } else {
    if (!in.price) throw InvalidInput("certify-direction needs a 'price' field");
    check_budget(*in.market, cfg.budget);
    din = direction_input(*in.market, snapshot(*in.market, *in.price));
  }
  if (static_cast<int>(in.direction->size()) != din.m) throw InvalidInput("direction has the wrong length");
  Direction d;
  d.d = *in.direction;
  for (int j = 0; j < din.m; ++j) {
    if (sgn(d.d[j]) < 0) throw InvalidInput("direction must be nonnegative");
    if (sgn(d.d[j]) > 0) d.support |= 1u << j;
  }
  const Mask xstar = compute_direction(din).xstar;
  if (d.support != xstar) {
    std::cerr << "direction support " << show_set(d.support) << " differs from X* " << show_set(xstar) << "\n";
    if (cfg.format == "json")
      std::cout << Json{{"support", io::mask_json(d.support)}, {"xstar", io::mask_json(xstar)}}.dump(2) << "\n";
    else
      std::cout << "support: " << show_set(d.support) << "\nX*: " << show_set(xstar) << "\n";
    return kSupport;
  }
  const auto pert = perturbed_ranks(din, xstar, d);
  const auto cert = lsc_certificate(pert, xstar, din.supply);
  const auto table = perturbed_table(pert, xstar, din.supply);
  if (cfg.format == "json") {
    Json j{{"xstar", io::mask_json(xstar)}, {"ok", cert.ok}, {"table", io::perturbed_table_json(table)}};
    if (!cert.ok) j["minimizer"] = io::mask_json(cert.witness);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "X*: " << show_set(xstar) << "\n";
    std::cout << "set";
    for (std::size_t i = 0; i < table.buyer_rows.size(); ++i) std::cout << "\tbuyer " << i + 1;
    std::cout << "\tobjective\n";
    for (std::size_t k = 0; k < table.subsets.size(); ++k) {
      std::cout << show_set(table.subsets[k]);
      for (const auto& row : table.buyer_rows) std::cout << "\t" << row[k];
      std::cout << "\t" << table.objective[k] << "\n";
    }
    std::cout << (cert.ok ? "PASS" : "FAIL: minimal minimizer " + show_set(cert.witness)) << "\n";
  }
  return cert.ok ? kOk : kCounterexample;
}

int dispatch(const RunConfig& cfg) {
  try {
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "trace") return cmd_trace(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    return cmd_certify(cfg);
  } catch (const ValuationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.witness)
      std::cerr << Json{{"x", io::bundle_json(e.witness->x)}, {"y", io::bundle_json(e.witness->y)},
                        {"j", e.witness->j + 1}}.dump()
                << "\n";
    return kInput;
  } catch (const IterationCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n" << io::trace_json(e.trace).dump() << "\n";
    return kCap;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ModelViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const WrongMode& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum Walrasian equilibrium solver for markets with payment frictions"};
  app.require_subcommand(1);
  RunConfig cfg;
  long budget_points = static_cast<long>(cfg.budget.max_lattice_points);
  for (const char* name : {"solve", "trace", "verify", "certify-direction"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("file", cfg.input_path, "instance file")->required();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--cap", cfg.cap, "iteration cap");
    sub->add_option("--budget-points", budget_points, "oracle lattice-point budget")->check(CLI::PositiveNumber);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInput;
  }
  cfg.budget.max_lattice_points = static_cast<std::size_t>(budget_points);
  return dispatch(cfg);
}
