#include "walras/io.hpp"

#include <fstream>

namespace walras::io {

Json to_json(const Rat& r) { return to_string(r); }

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(mpz_class(std::to_string(j.get<long long>())));
  if (j.is_number_float()) return parse_rat(j.dump());
  throw InvalidInput("expected a rational, got " + j.dump());
}

Json to_json(const LexScalar& x) { return Json::array({to_string(x.base()), to_string(x.logarg())}); }

Json bundle_json(const Bundle& x) { return Json(x); }

Bundle bundle_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("expected an integer vector, got " + j.dump());
  Bundle x;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InvalidInput("expected an integer, got " + v.dump());
    x.push_back(v.get<int>());
  }
  return x;
}

Json mask_json(Mask s) {
  Json out = Json::array();
  for (int j : elements(s)) out.push_back(j + 1);
  return out;
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::vector<Rat> rats_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("expected a list of rationals, got " + j.dump());
  std::vector<Rat> out;
  for (const auto& v : j) out.push_back(rat_from_json(v));
  return out;
}

Json rats_json(const std::vector<Rat>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(to_json(r));
  return out;
}

Valuation parse_valuation(const Json& j, const Bundle& cap) {
  const std::string type = field(j, "type").get<std::string>();
  if (type == "unit_demand") return Valuation::unit_demand(cap, rats_from_json(field(j, "values")));
  if (type == "additive") return Valuation::additive(cap, rats_from_json(field(j, "values")));
  if (type == "table") {
    std::vector<std::pair<Bundle, Rat>> t;
    for (const auto& e : field(j, "entries"))
      t.emplace_back(bundle_from_json(field(e, "bundle")), rat_from_json(field(e, "value")));
    return Valuation::from_bundles(cap, t);
  }
  throw InvalidInput("unknown valuation type '" + type + "'");
}

PiecewisePayment parse_payment(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "identity") return PiecewisePayment::identity();
  if (j.is_object() && j.contains("slope")) return PiecewisePayment::linear(rat_from_json(j.at("slope")));
  if (j.is_object() && j.contains("breakpoints")) {
    std::vector<std::pair<Rat, Rat>> bp;
    for (const auto& b : j.at("breakpoints")) {
      if (!b.is_array() || b.size() != 2) throw InvalidInput("breakpoint must be [price, payment]");
      bp.emplace_back(rat_from_json(b[0]), rat_from_json(b[1]));
    }
    return PiecewisePayment::from_breakpoints(bp, rat_from_json(field(j, "tail_slope")));
  }
  throw InvalidInput("unrecognized payment " + j.dump());
}

Json payment_json(const PiecewisePayment& q) {
  if (q.breakpoints().size() == 1) return Json{{"slope", to_json(q.tail_slope())}};
  Json bp = Json::array();
  for (const auto& [x, y] : q.breakpoints()) bp.push_back(Json::array({to_json(x), to_json(y)}));
  return Json{{"breakpoints", bp}, {"tail_slope", to_json(q.tail_slope())}};
}

}  // namespace

Json market_json(const MarketInstance& inst) {
  Json buyers = Json::array();
  for (const auto& b : inst.buyers()) {
    Json entries = Json::array();
    const Lattice& lat = b.valuation.lattice();
    for (std::size_t k = 0; k < lat.size(); ++k)
      entries.push_back(Json{{"bundle", bundle_json(lat.point(k))}, {"value", to_json(b.valuation.at_index(k))}});
    Json pays = Json::array();
    for (const auto& q : b.payments) pays.push_back(payment_json(q));
    buyers.push_back(Json{{"valuation", Json{{"type", "table"}, {"entries", entries}}}, {"payments", pays}});
  }
  return Json{{"supply", bundle_json(inst.supply())}, {"buyers", buyers}};
}

MarketInstance parse_market(const Json& j) {
  const Bundle supply = bundle_from_json(field(j, "supply"));
  const Json& bs = field(j, "buyers");
  if (!bs.is_array()) throw InvalidInput("'buyers' must be a list");
  for (int v : supply)
    if (v < 0) throw InvalidInput("supply must be nonnegative");
  std::vector<Buyer> buyers;
  int idx = 0;
  for (const auto& b : bs) {
    ++idx;
    try {
      Buyer buyer{parse_valuation(field(b, "valuation"), supply), {}};
      const Json& pays = field(b, "payments");
      if (pays.is_string() && pays.get<std::string>() == "identity") {
        buyer.payments.assign(supply.size(), PiecewisePayment::identity());
      } else {
        for (const auto& q : pays) buyer.payments.push_back(parse_payment(q));
      }
      buyers.push_back(std::move(buyer));
    } catch (const ValuationError& e) {
      throw ValuationError("buyer " + std::to_string(idx) + ": " + e.what(), e.witness);
    } catch (const InvalidInput& e) {
      throw InvalidInput("buyer " + std::to_string(idx) + ": " + e.what());
    }
  }
  return MarketInstance(supply, std::move(buyers));
}

DirectionInput FamilyFixture::input() const {
  DirectionInput in;
  in.m = static_cast<int>(supply.size());
  in.supply = supply;
  for (const auto& f : families) {
    if (!is_m_convex(f)) throw InvalidInput("demand family is not M-convex");
    in.ranks.push_back(rank_of_family(in.m, f));
  }
  in.slopes = slopes;
  return in;
}

FamilyFixture parse_family_fixture(const Json& j) {
  FamilyFixture f;
  f.supply = bundle_from_json(field(j, "supply"));
  const std::size_t m = f.supply.size();
  for (const auto& fam : field(j, "families")) {
    std::vector<Bundle> bundles;
    for (const auto& b : fam) {
      bundles.push_back(bundle_from_json(b));
      if (bundles.back().size() != m) throw InvalidInput("family bundle has the wrong length");
    }
    if (bundles.empty()) throw InvalidInput("empty demand family");
    f.families.push_back(std::move(bundles));
  }
  for (const auto& row : field(j, "slopes")) {
    f.slopes.push_back(rats_from_json(row));
    if (f.slopes.back().size() != m) throw InvalidInput("slope row has the wrong length");
    for (const auto& q : f.slopes.back())
      if (sgn(q) <= 0) throw InvalidInput("slopes must be positive");
  }
  if (f.slopes.size() != f.families.size()) throw InvalidInput("one slope row per family required");
  if (f.families.size() < 2) throw InvalidInput("at least two buyers required");
  return f;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

InputFile parse_input(const Json& j) {
  InputFile f;
  f.raw = j;
  try {
    if (j.is_object() && j.contains("families"))
      f.families = parse_family_fixture(j);
    else
      f.market = parse_market(j);
    if (j.contains("price")) f.price = rats_from_json(j.at("price"));
    if (j.contains("direction")) f.direction = rats_from_json(j.at("direction"));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("schema error: ") + e.what());
  }
  return f;
}

InputFile load_input(const std::string& path) { return parse_input(read_json_file(path)); }

Json price_json(const PriceVector& p) { return rats_json(p); }

Json record_json(const IterationRecord& r) {
  Json z = Json::array();
  for (const auto& v : r.z) z.push_back(to_json(v));
  return Json{{"price_before", price_json(r.price_before)},
              {"xstar", mask_json(r.xstar)},
              {"direction", rats_json(r.direction.d)},
              {"dual_value", to_json(r.dual_value)},
              {"z", z},
              {"step", to_json(r.step)},
              {"stop", to_string(r.stop)},
              {"event", to_string(r.event)},
              {"direction_kept", r.direction_kept},
              {"theta", r.theta}};
}

Json trace_json(const AuctionTrace& t) {
  Json it = Json::array();
  for (const auto& r : t.iterations) it.push_back(record_json(r));
  return Json{{"iterations", it}, {"final_price", price_json(t.final_price)}};
}

Json allocation_json(const std::vector<Bundle>& x) {
  Json out = Json::array();
  for (const auto& xi : x) out.push_back(bundle_json(xi));
  return out;
}

Json rank_table_json(const std::vector<RankOracle>& ranks, Mask sub) {
  Json rows = Json::array();
  for (Mask x = 0; x <= sub; ++x) {
    if (!is_subset(x, sub)) continue;
    Json r = Json::array();
    for (const auto& rk : ranks) r.push_back(rk.rank(x));
    rows.push_back(Json{{"set", mask_json(x)}, {"ranks", r}});
  }
  return rows;
}

Json perturbed_table_json(const PerturbedTable& t) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < t.subsets.size(); ++k) {
    Json r = Json::array();
    for (const auto& row : t.buyer_rows) r.push_back(row[k]);
    rows.push_back(Json{{"set", mask_json(t.subsets[k])}, {"ranks", r}, {"objective", t.objective[k]}});
  }
  return rows;
}

}  // namespace walras::io
