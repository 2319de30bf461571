// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "ssvqd/cli.hpp"

using namespace ssvqd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ssvqd_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::RunConfig h2_config() {
  cli::RunConfig c;
  c.fcidump_path = oracle::data_path("h2_631g.fcidump");
  c.n_active = 4;
  c.n_states = 2;
  return c;
}

}  // namespace

TEST(Cli, LoadsConfigAndResolvesRelativePaths) {
  const fs::path dir = scratch("load");
  fs::copy_file(oracle::data_path("h2_631g.fcidump"), dir / "h2.fcidump");
  const fs::path p = write_config(dir, {{"fcidump", "h2.fcidump"},
                                        {"n_states", 2},
                                        {"theta_method", "bfgs"},
                                        {"per_state_init", {{1, 2}, {1, 3}}},
                                        {"seed", 7}});
  const cli::RunConfig c = cli::load_config(p.string());
  EXPECT_EQ(fs::path(c.fcidump_path), (dir / "h2.fcidump").lexically_normal());
  EXPECT_EQ(c.optimizer.theta_method, ThetaMethod::bfgs);
  EXPECT_EQ(c.optimizer.seed, 7u);
  ASSERT_EQ(c.per_state_init.size(), 2u);
  EXPECT_EQ(c.per_state_init[1], (std::vector<int>{1, 3}));
}

TEST(Cli, RejectsBadConfigs) {
  const fs::path dir = scratch("bad");
  EXPECT_THROW(cli::load_config(write_config(dir, {{"unknown_key", 1}}).string()), ConfigError);
  EXPECT_THROW(cli::load_config(write_config(dir, {{"n_states", "two"}}).string()), ConfigError);
  EXPECT_THROW(cli::load_config(write_config(dir, {{"theta_method", "cobyla"}}).string()), ConfigError);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(cli::load_config((dir / "broken.json").string()), ConfigError);

  const MolecularIntegrals ints = read_fcidump(oracle::data_path("h2_631g.fcidump"));
  cli::RunConfig c = h2_config();
  EXPECT_NO_THROW(cli::validate(c, ints));
  c.n_active = 5;
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c = h2_config();
  c.n_active = 10;
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c = h2_config();
  c.per_state_init = {{1, 1}};
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c.per_state_init = {{1, 5}};
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c.per_state_init = {{1, 2, 3}};
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c = h2_config();
  c.weights = {1.0};
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
  c.weights = {1.0, 0.0};
  EXPECT_THROW(cli::validate(c, ints), ConfigError);
}

TEST(Cli, FciSummaryAndDeterminism) {
  const fs::path dir = scratch("fci");
  cli::RunConfig c = h2_config();
  std::ostringstream log;
  ASSERT_EQ(cli::run("fci", c, (dir / "a").string(), log), cli::kOk) << log.str();
  ASSERT_EQ(cli::run("fci", c, (dir / "b").string(), log), cli::kOk) << log.str();
  json a = read_json(dir / "a" / "summary.json");
  json b = read_json(dir / "b" / "summary.json");
  EXPECT_NEAR(a["roots"][0]["energy"]["electronic"].get<double>(), -1.872, 2e-3);
  EXPECT_NEAR(a["roots"][1]["energy"]["electronic"].get<double>(), -1.474, 2e-3);
  EXPECT_NEAR(a["roots"][0]["energy"]["total"].get<double>() - a["roots"][0]["energy"]["electronic"].get<double>(),
              a["e_core"].get<double>(), 1e-12);
  EXPECT_TRUE(a["timing"].contains("fci_seconds"));
  a.erase("timing");
  b.erase("timing");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(slurp(dir / "a" / "fci_roots.csv"), slurp(dir / "b" / "fci_roots.csv"));
}

TEST(Cli, ZeroOuterBudgetStillWritesRecord) {
  const fs::path dir = scratch("zero");
  cli::RunConfig c = h2_config();
  c.optimizer.max_outer = 0;
  std::ostringstream log;
  EXPECT_EQ(cli::run("ssvqd", c, dir.string(), log), cli::kNotConverged);
  const json s = read_json(dir / "summary.json");
  EXPECT_FALSE(s["converged"].get<bool>());
  EXPECT_EQ(s["states"].size(), 2u);
  EXPECT_EQ(s["states"][0]["iterations"].get<int>(), 0);
  const std::string trace = slurp(dir / "trace_state_2.csv");
  EXPECT_EQ(trace.rfind("iteration,energy,abs_error_fci", 0), 0u);
  EXPECT_NE(trace.find("overlap_sq_1"), std::string::npos);
}

TEST(Cli, SsvqdTraceMatchesSummary) {
  const fs::path dir = scratch("ssvqd");
  cli::RunConfig c = h2_config();
  std::ostringstream log;
  ASSERT_EQ(cli::run("ssvqd", c, dir.string(), log), cli::kOk) << log.str();
  const json s = read_json(dir / "summary.json");
  const std::string trace = slurp(dir / "trace_state_1.csv");
  const int rows = static_cast<int>(std::count(trace.begin(), trace.end(), '\n'));
  // Header, iteration zero, then one row per two-step iteration.
  EXPECT_EQ(rows, 2 + s["states"][0]["iterations"].get<int>());
  EXPECT_LT(s["states"][0]["relative_error"].get<double>(), 4.5e-3);
  EXPECT_TRUE(s.contains("weighted_sum_error"));
}

TEST(Cli, ErrorsMapToExitCodes) {
  const fs::path dir = scratch("codes");
  std::ostringstream log;
  cli::RunConfig c = h2_config();
  c.fcidump_path = (dir / "missing.fcidump").string();
  EXPECT_EQ(cli::run("fci", c, dir.string(), log), cli::kConfigError);
  std::ofstream(dir / "broken.fcidump") << "&FCI NORB=2,NELEC=2,MS2=0 &END\n 0.5 1 1 x\n";
  c.fcidump_path = (dir / "broken.fcidump").string();
  EXPECT_EQ(cli::run("fci", c, dir.string(), log), cli::kParseError);
  std::ofstream(dir / "range.fcidump") << "&FCI NORB=2,NELEC=2,MS2=0 &END\n 0.5 9 1 1 1\n";
  c.fcidump_path = (dir / "range.fcidump").string();
  EXPECT_EQ(cli::run("fci", c, dir.string(), log), cli::kParseError);
  c = h2_config();
  EXPECT_EQ(cli::run("nonsense", c, dir.string(), log), cli::kConfigError);
  c.n_states = 0;
  EXPECT_EQ(cli::run("ssvqd", c, dir.string(), log), cli::kConfigError);
}

TEST(Cli, CheckSubcommandsPass) {
  const fs::path dir = scratch("checks");
  cli::RunConfig c;
  c.check_instances = 5;
  std::ostringstream log;
  EXPECT_EQ(cli::run("gradcheck", c, (dir / "g").string(), log), cli::kOk) << log.str();
  EXPECT_TRUE(read_json(dir / "g" / "summary.json")["passed"].get<bool>());
  EXPECT_EQ(cli::run("overlap-check", c, (dir / "o").string(), log), cli::kOk) << log.str();
  EXPECT_EQ(read_json(dir / "o" / "summary.json")["checks"].size(), 4u);
}
