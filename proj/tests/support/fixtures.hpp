#pragma once

#include <string>

#include "walras/io.hpp"
#include "walras/market.hpp"

#ifndef WALRAS_TEST_DATA
#error "WALRAS_TEST_DATA must point at tests/data"
#endif

namespace walras::testing {

inline std::string data_path(const std::string& name) { return std::string(WALRAS_TEST_DATA) + "/" + name; }

inline io::InputFile load_fixture(const std::string& name) { return io::load_input(data_path(name)); }

inline MarketInstance load_market_fixture(const std::string& name) { return *load_fixture(name).market; }

inline PriceVector prices(const std::vector<const char*>& xs) {
  PriceVector p;
  for (const char* x : xs) p.push_back(parse_rat(x));
  return p;
}

// Buyer with v = 0 everywhere and identity payments; pads single-buyer setups.
inline Buyer idle_buyer(const Bundle& cap) {
  return Buyer{Valuation::additive(cap, std::vector<Rat>(cap.size(), Rat(0))),
               std::vector<PiecewisePayment>(cap.size(), PiecewisePayment::identity())};
}

}  // namespace walras::testing
