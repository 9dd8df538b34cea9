#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "walras/allocation.hpp"
#include "walras/auction.hpp"
#include "walras/direction.hpp"
#include "walras/market.hpp"

namespace walras::io {

using Json = nlohmann::ordered_json;

Json to_json(const Rat& r);
Rat rat_from_json(const Json& j);
Json to_json(const LexScalar& x);  // ["base", "logarg"]
Json bundle_json(const Bundle& x);
Bundle bundle_from_json(const Json& j);
Json mask_json(Mask s);  // 1-based good labels

Json market_json(const MarketInstance& inst);
MarketInstance parse_market(const Json& j);

// Direction-module fixture: demand families and slopes given directly.
struct FamilyFixture {
  Bundle supply;
  std::vector<std::vector<Bundle>> families;
  std::vector<std::vector<Rat>> slopes;
  DirectionInput input() const;
};
FamilyFixture parse_family_fixture(const Json& j);

struct InputFile {
  Json raw;
  std::optional<MarketInstance> market;
  std::optional<FamilyFixture> families;
  std::optional<PriceVector> price;
  std::optional<std::vector<Rat>> direction;
};

Json read_json_file(const std::string& path);
InputFile parse_input(const Json& j);
InputFile load_input(const std::string& path);

Json record_json(const IterationRecord& rec);
Json trace_json(const AuctionTrace& t);
Json allocation_json(const std::vector<Bundle>& x);
Json price_json(const PriceVector& p);
Json rank_table_json(const std::vector<RankOracle>& ranks, Mask universe_subset);
Json perturbed_table_json(const PerturbedTable& t);

}  // namespace walras::io
