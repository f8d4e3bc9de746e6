/*
 * Copyright 2026 The nbrw-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nbrw/nbrw.hpp"

namespace fs = std::filesystem;
using nbrw::io::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("nbrw_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& sub = "") {
    const fs::path out = sub.empty() ? dir_ : dir_ / sub;
    const std::string cmd = std::string(NBRW_CLI_PATH) + " " + args + " --out " + out.string() + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string file(const std::string& name) const { return slurp(dir_ / name); }
  json json_file(const std::string& name) const { return json::parse(file(name)); }

  fs::path dir_;
};

TEST_F(Cli, GeneratePetersen) {
  ASSERT_EQ(run("generate --named petersen"), 0);
  const auto edges = file("graph.edges");
  EXPECT_EQ(std::count(edges.begin(), edges.end(), '\n'), 16);  // header + 15 edges
  EXPECT_EQ(nbrw::parse_edge_list(edges), nbrw::named_graph("petersen"));
  EXPECT_EQ(file("stdout.txt"), "n=10 d=3 girth=5 lambda=2\n");
  auto meta = json_file("graph.meta.json");
  EXPECT_EQ(meta["girth"], 5);
  EXPECT_EQ(meta["meta"]["master_seed"], 1);
  EXPECT_EQ(meta["meta"]["tool_version"], NBRW_VERSION);
  EXPECT_EQ(meta["meta"]["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(fs::exists(dir_ / "run.log"));
}

TEST_F(Cli, GenerateRandomIsReproducible) {
  ASSERT_EQ(run("generate --n 1000 --d 3 --seed 1", "a"), 0);
  ASSERT_EQ(run("generate --n 1000 --d 3 --seed 1", "b"), 0);
  EXPECT_EQ(slurp(dir_ / "a/graph.edges"), slurp(dir_ / "b/graph.edges"));
  EXPECT_EQ(slurp(dir_ / "a/graph.meta.json"), slurp(dir_ / "b/graph.meta.json"));
  ASSERT_EQ(run("generate --n 1000 --d 3 --seed 2", "c"), 0);
  EXPECT_NE(slurp(dir_ / "a/graph.edges"), slurp(dir_ / "c/graph.edges"));
  EXPECT_NE(slurp(dir_ / "a/graph.meta.json"), slurp(dir_ / "c/graph.meta.json"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("generate --n 3 --d 3"), 3);  // odd degree sum
  EXPECT_EQ(run("mixing --named k33"), 3);
  EXPECT_EQ(run("generate --named dodecahedron"), 2);
  EXPECT_EQ(run("generate"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("visits --named k4 --walk lazy"), 2);
  EXPECT_EQ(run("visits --named k4 --start 9"), 2);
  EXPECT_EQ(run("generate --n 4 --d 3 --min-girth 4 --max-attempts 3"), 4);
  EXPECT_EQ(run("mixing --named petersen --cap 3"), 4);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, MixingK4) {
  ASSERT_EQ(run("mixing --named k4 --cap 100"), 0);
  auto j = json_file("mixing.json");
  EXPECT_NEAR(j["rho"].get<double>(), 0.70711, 1e-5);
  EXPECT_FALSE(j["tau"].is_null());
  EXPECT_EQ(j["dev"].size(), 101u);
  EXPECT_TRUE(j.contains("meta"));
}

TEST_F(Cli, MixingPetersenDevCsv) {
  ASSERT_EQ(run("mixing --named petersen"), 0);
  std::istringstream csv(file("dev.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# tool_version=", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line, "k,dev");
  int rows = 0;
  while (std::getline(csv, line)) {
    const double dev = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(dev, 0.0);
    ++rows;
  }
  EXPECT_EQ(rows, 201);
}

TEST_F(Cli, VisitsLengthOne) {
  ASSERT_EQ(run("visits --named petersen --length 1 --counts-csv --trace"), 0);
  const auto csv = file("histogram.csv");
  EXPECT_NE(csv.find("\n1,1,0.1,"), std::string::npos);
  EXPECT_NE(csv.find("\n0,9,0.9,"), std::string::npos);
  auto report = json_file("report.json");
  EXPECT_EQ(report["pooled"]["counted_visits"], 1);
  EXPECT_TRUE(fs::exists(dir_ / "counts.csv"));
  EXPECT_NE(file("trace.csv").find("step,vertex\n0,0\n1,"), std::string::npos);
}

TEST_F(Cli, OracleUsesSameSchema) {
  ASSERT_EQ(run("visits --named petersen --length 30 --trials 3", "walk"), 0);
  ASSERT_EQ(run("visits --oracle --n 10 --length 30 --trials 3", "oracle"), 0);
  auto walk = json::parse(slurp(dir_ / "walk/report.json"));
  auto oracle = json::parse(slurp(dir_ / "oracle/report.json"));
  std::vector<std::string> wk, ok;
  for (auto& [k, v] : walk.items()) wk.push_back(k);
  for (auto& [k, v] : oracle.items()) ok.push_back(k);
  EXPECT_EQ(wk, ok);
  EXPECT_EQ(oracle["mode"], "balls_and_bins");
  const auto columns = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);  // meta comment
    std::getline(in, line);
    return line;
  };
  EXPECT_EQ(columns(slurp(dir_ / "walk/histogram.csv")), columns(slurp(dir_ / "oracle/histogram.csv")));
}

TEST_F(Cli, VisitsThreadIndependent) {
  const std::string args = "visits --n 300 --trials 7 --walk srw --seed 5";
  ASSERT_EQ(run(args + " --threads 1", "t1"), 0);
  ASSERT_EQ(run(args + " --threads 3", "t3"), 0);
  for (const char* f : {"report.json", "histogram.csv"})
    EXPECT_EQ(slurp(dir_ / "t1" / f), slurp(dir_ / "t3" / f)) << f;
}

TEST_F(Cli, SievePoissonPreset) {
  ASSERT_EQ(run("sieve --preset poisson --mu 1 --m 0 --kmax 12"), 0);
  auto j = json_file("sieve.json");
  const double lower = j["lower"], upper = j["upper"];
  const double inv_e = std::exp(-1.0);
  EXPECT_LE(lower, inv_e);
  EXPECT_GE(upper, inv_e);
  EXPECT_LE(upper - inv_e, 1.0 / std::tgamma(14.0));
  EXPECT_LE(upper - lower, 1.0 / std::tgamma(13.0) * (1 + 1e-9));
}

TEST_F(Cli, SieveCoinPreset) {
  ASSERT_EQ(run("sieve --preset coin --kmax 1"), 0);
  auto j = json_file("sieve.json");
  EXPECT_DOUBLE_EQ(j["lower"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["upper"].get<double>(), 1.0);
}

TEST_F(Cli, SieveTableFileAndMissingEntries) {
  auto table = nbrw::io::to_json(nbrw::poisson_moment_table(nbrw::PoissonParams({1.0, 0.5}), 4));
  { std::ofstream(dir_ / "full.json") << table.dump(); }
  ASSERT_EQ(run("sieve --table " + (dir_ / "full.json").string() + " --m 1,0 --kmax 3"), 0);
  auto j = json_file("sieve.json");
  const double want = std::exp(-1.5);  // Pr[Po(1) = 1] Pr[Po(0.5) = 0]
  EXPECT_LE(j["lower"].get<double>(), want + 1e-12);
  EXPECT_GE(j["upper"].get<double>(), want - 1e-12);

  table["entries"].erase(7);
  { std::ofstream(dir_ / "holey.json") << table.dump(); }
  EXPECT_EQ(run("sieve --table " + (dir_ / "holey.json").string() + " --m 1,0 --kmax 3"), 2);
  EXPECT_NE(file("stderr.txt").find("TableTooSmall"), std::string::npos);
}

TEST_F(Cli, SieveFromTrialsWithBrunCheck) {
  { std::ofstream(dir_ / "tuples.txt") << "# loads\n0 1\n1 0\n2 1\n0 0\n"; }
  ASSERT_EQ(run("sieve --from-trials " + (dir_ / "tuples.txt").string() +
                " --m 0,0 --kmax 2 --epsilon 0.01 --mu 1,1 --brun-s 2 --brun-T 0"),
            0);
  auto j = json_file("sieve.json");
  EXPECT_TRUE(j.contains("brun"));
  EXPECT_FALSE(j["brun"]["hypothesis_ok"].get<bool>());
}

TEST_F(Cli, ConfigFile) {
  { std::ofstream(dir_ / "run.cfg") << "seed=9\nnamed=petersen\n[visits]\nlength=50\ntrials=2\n"; }
  ASSERT_EQ(run("visits --config " + (dir_ / "run.cfg").string(), "cfg"), 0);
  ASSERT_EQ(run("visits --seed 9 --named petersen --length 50 --trials 2", "flags"), 0);
  auto a = json::parse(slurp(dir_ / "cfg/report.json"));
  auto b = json::parse(slurp(dir_ / "flags/report.json"));
  EXPECT_EQ(a["length"], 50);
  EXPECT_EQ(a["meta"]["master_seed"], 9);
  EXPECT_EQ(a["pooled"], b["pooled"]);
}

}  // namespace
