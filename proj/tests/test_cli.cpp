#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hosc::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hosc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string planted() {
    const auto p = path("planted.csv");
    EXPECT_EQ(run({"generate", "--out", p, "--corpus-out", path("corpus.jsonl")}).code, 0);
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ClusterPlanted) {
  const auto r = run({"cluster", planted(), "--out", path("a.csv"), "--stats", path("s.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("clusters: 5\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("noise: 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("N (occupied hyperoctants): "), std::string::npos);
  const auto stats = nlohmann::json::parse(slurp(path("s.json")));
  EXPECT_EQ(stats["stats"]["cluster_count"], 5);
  EXPECT_EQ(stats["config"]["k0"], 2);
  EXPECT_EQ(stats["config"]["anneal"]["seed"], 42);
  EXPECT_EQ(stats["input"]["hash"].get<std::string>().size(), 16u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"cluster", path("missing.csv")}).code, 2);
  const auto p = planted();
  EXPECT_EQ(run({"cluster", p, "--k0", "1"}).code, 3);
  EXPECT_EQ(run({"cluster", p, "--delta0", "-1"}).code, 3);
  EXPECT_EQ(run({"cluster", p, "--bogus"}).code, 3);
  EXPECT_EQ(run({"sweep", p, "--from", "5", "--to", "1"}).code, 3);
  spit(path("ragged.csv"), "x,y\n1,2\n3\n");
  const auto r = run({"cluster", path("ragged.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_EQ(run({}).code, 3);
}

TEST_F(Cli, DeterministicOutputs) {
  const auto p = planted();
  for (const char* tag : {"1", "2"})
    ASSERT_EQ(run({"--seed", "7", "cluster", p, "--out", path(std::string("a") + tag), "--stats", path(std::string("s") + tag)}).code, 0);
  EXPECT_EQ(slurp(path("a1")), slurp(path("a2")));
  EXPECT_EQ(slurp(path("s1")), slurp(path("s2")));
  EXPECT_FALSE(slurp(path("s1")).empty());
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  const auto p = planted();
  spit(path("bad.toml"), "[cluster]\nk0 = 1\n");
  EXPECT_EQ(run({"--config", path("bad.toml"), "cluster", p}).code, 3);
  EXPECT_EQ(run({"--config", path("bad.toml"), "cluster", p, "--k0", "2"}).code, 0);
  spit(path("seed.toml"), "seed = 9\n");
  ASSERT_EQ(run({"--config", path("seed.toml"), "cluster", p, "--stats", path("s.json")}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("s.json")))["config"]["anneal"]["seed"], 9);
}

TEST_F(Cli, SweepHosReachesMaxResolution) {
  const auto p = planted();
  const auto r = run({"sweep", p, "--method", "hos", "--from", "1e-6", "--to", "1e6", "--steps", "7", "--log-scale", "--out", path("sw.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(path("sw.csv"));
  EXPECT_EQ(csv.rfind("# format_version 1\nparam,clusters,noise\n", 0), 0u);
  EXPECT_TRUE(csv.ends_with(",5,0\n")) << csv;
}

TEST_F(Cli, SweepDbscanStartsEmpty) {
  const auto p = planted();
  const auto r = run({"sweep", p, "--method", "dbscan", "--param", "eps", "--from", "1e-9", "--to", "1.5", "--steps", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1e-09,0,200\n"), std::string::npos) << r.out;
  EXPECT_EQ(run({"sweep", p, "--method", "dbscan", "--param", "delta0", "--from", "0.1", "--to", "1"}).code, 3);
}

TEST_F(Cli, Correlate) {
  ASSERT_EQ(run({"generate", "--dim", "100", "--out", path("d100.csv")}).code, 0);
  auto r = run({"correlate", path("d100.csv"), "--pairs", "500", "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("pearson(angular, levenshtein): ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GT(std::stod(r.out.substr(pos + 31)), 0.5);

  spit(path("same.csv"), "x,y\n1,1\n1,1\n1,1\n");
  r = run({"correlate", path("same.csv"), "--pairs", "100"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pairs: 3\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("nan"), std::string::npos);
  EXPECT_NE(r.err.find("warn"), std::string::npos);
}

TEST_F(Cli, SamplePairsAreDistinct) {
  const auto pairs = hosc::cli::sample_pairs(30, 100, 1);
  ASSERT_EQ(pairs.size(), 100u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_LT(pairs[i].first, pairs[i].second);
    EXPECT_LT(pairs[i].second, 30u);
    if (i > 0) {
      EXPECT_LT(pairs[i - 1], pairs[i]);
    }
  }
  EXPECT_EQ(hosc::cli::sample_pairs(4, 100, 1).size(), 6u);
}

TEST_F(Cli, EvaluateMeasures) {
  const auto p = planted();
  ASSERT_EQ(run({"cluster", p, "--out", path("a.csv")}).code, 0);
  auto r = run({"evaluate", path("a.csv"), path("corpus.jsonl"), "--measure", "ami", "--out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ami: 1\n");
  EXPECT_EQ(nlohmann::json::parse(slurp(path("m.json")))["value"], 1.0);
  r = run({"evaluate", path("a.csv"), path("corpus.jsonl"), "--measure", "majority"});
  EXPECT_NE(r.out.find("majority: 1\n"), std::string::npos) << r.out;
  EXPECT_EQ(run({"evaluate", path("a.csv"), path("corpus.jsonl"), "--measure", "coh-pmi"}).code, 0);

  // One-hot style table: each cluster's vocabulary shares a single vector.
  spit(path("assign.csv"), "point_id,cluster_id\n0,0\n1,0\n2,1\n3,1\n");
  spit(path("docs.jsonl"),
       "{\"id\":0,\"text\":\"a b\",\"label\":\"x\"}\n{\"id\":1,\"text\":\"a b\",\"label\":\"x\"}\n"
       "{\"id\":2,\"text\":\"c d\",\"label\":\"y\"}\n{\"id\":3,\"text\":\"d c\",\"label\":\"y\"}\n");
  spit(path("emb.txt"), "a 1 0\nb 1 0\nc 0 1\nd 0 1\n");
  r = run({"evaluate", path("assign.csv"), path("docs.jsonl"), "--measure", "coh-cos", "--embeddings", path("emb.txt")});
  EXPECT_EQ(r.out, "coh-cos: 1\n") << r.err;

  spit(path("short.jsonl"), "{\"id\":0,\"text\":\"a\",\"label\":\"x\"}\n");
  EXPECT_EQ(run({"evaluate", path("assign.csv"), path("short.jsonl"), "--measure", "ami"}).code, 2);
}

TEST_F(Cli, RotateSignsGraphBaseline) {
  const auto p = planted();
  auto r = run({"rotate", p, "--plan-out", path("plan.json"), "--out", path("rot.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"rotate", p, "--apply", path("plan.json"), "--out", path("rot2.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("rot.csv")), slurp(path("rot2.csv")));

  ASSERT_EQ(run({"cluster", p, "--out", path("a.csv")}).code, 0);
  r = run({"signs", p, "--assignments", path("a.csv"), "--cluster", "0", "--plan", path("plan.json"), "--out", path("sg.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rows: 40\n"), std::string::npos) << r.out;
  EXPECT_EQ(run({"signs", p, "--cluster", "0"}).code, 3);

  r = run({"graph", p, "--default-d0", "--out", path("g.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("g.txt")).rfind("# format_version 1\n# d0 ", 0), 0u);

  r = run({"baseline", p, "--eps", "0.8", "--min-pts", "4", "--stats", path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(path("b.json")))["method"], "dbscan");
}
