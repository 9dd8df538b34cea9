#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "support/fixtures.hpp"

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI on a fixture; stderr is folded into out when merge is set.
CliRun cli(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(WALRAS_CLI) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const char* name) { return walras::testing::data_path(name); }

bool has(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, SolvePrintsPriceAndAllocation) {
  const CliRun r = cli("solve " + fx("two_bidder_symmetric.json") + " --format json");
  EXPECT_EQ(r.code, 0);
  const auto j = walras::io::Json::parse(r.out);
  EXPECT_EQ(j["final_price"].dump(), R"(["1","2"])");
  EXPECT_EQ(j["allocation"].size(), 2u);
}

TEST(Cli, TraceTableFormat) {
  const CliRun r = cli("trace " + fx("frictional_trajectory.json") + " --format table");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "event=dual_value_increase"));
  EXPECT_TRUE(has(r.out, "p=[35/8 35/8]"));
}

TEST(Cli, VerifyPassesOnFixtures) {
  for (const char* f : {"frictional_trajectory.json", "two_bidder_symmetric.json", "piecewise_frictions.json",
                        "scaled_potential.json", "already_cleared.json"}) {
    const CliRun r = cli("verify " + fx(f));
    EXPECT_EQ(r.code, 0) << f << "\n" << r.out;
    EXPECT_FALSE(has(r.out, "FAIL")) << f;
    EXPECT_TRUE(has(r.out, "PASS duality")) << f << "\n" << r.out;
  }
}

TEST(Cli, CertifyDirection) {
  CliRun r = cli("certify-direction " + fx("lsc_counterexample.json") + " --format table");
  EXPECT_EQ(r.code, 4);
  EXPECT_TRUE(has(r.out, "FAIL: minimal minimizer {3}")) << r.out;
  r = cli("certify-direction " + fx("lsc_counterexample_repaired.json") + " --format json");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(walras::io::Json::parse(r.out)["ok"].get<bool>());
  EXPECT_EQ(cli("certify-direction " + fx("lsc_counterexample_bad_support.json")).code, 5);
  EXPECT_EQ(cli("certify-direction " + fx("two_bidder_symmetric.json")).code, 0);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(cli("solve " + fx("no_buyers.json")).code, 2);
  const CliRun ns = cli("solve " + fx("non_substitutes.json"), true);
  EXPECT_EQ(ns.code, 2);
  EXPECT_TRUE(has(ns.out, "\"x\"")) << ns.out;
  EXPECT_EQ(cli("solve " + fx("missing.json")).code, 2);
  EXPECT_EQ(cli("solve " + fx("two_bidder_symmetric.json") + " --format xml").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  const CliRun b = cli("verify " + fx("two_bidder_symmetric.json") + " --budget-points 3", true);
  EXPECT_EQ(b.code, 2);
  EXPECT_TRUE(has(b.out, "budget")) << b.out;
}

TEST(Cli, IterationCap) {
  const CliRun r = cli("solve " + fx("frictional_trajectory.json") + " --cap 1", true);
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(has(r.out, "\"iterations\""));
}
