// Copyright 2026 The hdcam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdcam/cli.hpp"
#include "hdcam/config.hpp"
#include "hdcam/error.hpp"
#include "hdcam/trace_io.hpp"
#include "test_util.hpp"

namespace hdcam {
namespace {

using json = nlohmann::json;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hdcam");
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return CliRun{code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class Fixture : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("VACOAL_SEED");
    CliRun r = cli({"gen-dag", "--nodes", "300", "--seed", "7", "--start-count", "4",
                 "--out-edges", f("edges.csv"), "--out-predicates", f("preds.csv"),
                 "--out-starts", f("starts.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::string f(const std::string& name) const { return dir_.file(name); }
  TempDir dir_{"cli"};
};

TEST(RunConfig, SetAndValidate) {
  RunConfig c;
  c.set("fs", "5");
  c.set("mode", "rescue");
  c.set("concept_members", "a, b ,c");
  c.set("sweep", "64:28,128:27");
  EXPECT_EQ(c.fs, 5u);
  EXPECT_EQ(c.mode, SearchMode::rescue);
  EXPECT_EQ(c.concept_members, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(c.sweep.size(), 2u);
  EXPECT_EQ(c.sweep[1].blocks, 128u);
  EXPECT_EQ(c.sweep[1].depth_bits, 27u);
  c.validate();
  EXPECT_THROW(c.set("fs", "five"), ConfigError);
  EXPECT_THROW(c.set("no_such_key", "1"), ConfigError);
  EXPECT_THROW(c.set("mode", "fast"), ConfigError);
  RunConfig bad;
  bad.dim = 12801;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.dim = 12800;
  bad.rr = 2;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.rr = 0;
  bad.depth_exp = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_EQ(default_sweep().size(), 5u);
  for (const auto& p : default_sweep()) EXPECT_EQ(std::log2(p.blocks) + p.depth_bits, 34.0);
}

TEST(RunConfig, LoadFile) {
  TempDir dir("cfg");
  {
    std::ofstream os(dir.file("run.cfg"));
    os << "# experiment\nfs = 7\n\nseed=99\n  mode = dont_care  \n";
  }
  RunConfig c;
  c.load_file(dir.file("run.cfg"));
  EXPECT_EQ(c.fs, 7u);
  EXPECT_EQ(c.seed, 99u);
  {
    std::ofstream os(dir.file("bad.cfg"));
    os << "fs 7\n";
  }
  EXPECT_THROW(c.load_file(dir.file("bad.cfg")), ConfigError);
  EXPECT_THROW(c.load_file(dir.file("absent.cfg")), ConfigError);
}

TEST_F(Fixture, GenDagIsByteDeterministic) {
  ASSERT_EQ(cli({"gen-dag", "--nodes", "300", "--seed", "7", "--start-count", "4", "--out-edges",
                 f("e2.csv"), "--out-predicates", f("p2.csv"), "--out-starts", f("s2.txt")})
                .code,
            0);
  EXPECT_EQ(slurp(f("edges.csv")), slurp(f("e2.csv")));
  EXPECT_EQ(slurp(f("preds.csv")), slurp(f("p2.csv")));
  EXPECT_EQ(slurp(f("starts.txt")), slurp(f("s2.txt")));
  EXPECT_FALSE(slurp(f("edges.csv")).empty());
}

TEST_F(Fixture, IngestAndPurify) {
  CliRun r = cli({"ingest", "--edges", f("edges.csv"), "--predicates", f("preds.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_GT(j["edges"].get<int>(), 300);
  r = cli({"purify", "--edges", f("edges.csv"), "--out", f("pure.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["removed_pairs"], 0);
}

TEST_F(Fixture, RescueTraceMatchesOracle) {
  ASSERT_EQ(cli({"learn", "--edges", f("edges.csv"), "--snapshot", f("mem.bin"), "--rr", "1",
                 "--depth-exp", "12"})
                .code,
            0);
  CliRun t = cli({"trace", "--snapshot", f("mem.bin"), "--edges", f("edges.csv"), "--starts",
               f("starts.txt"), "--mode", "rescue", "--rr", "1", "--out", f("r.csv"),
               "--summary", f("sum.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_EQ(cli({"oracle", "--edges", f("edges.csv"), "--starts", f("starts.txt"), "--out",
                 f("o.csv")})
                .code,
            0);
  CliRun c = cli({"compare", "--a", f("r.csv"), "--b", f("o.csv")});
  ASSERT_EQ(c.code, 0) << c.err;
  auto j = json::parse(c.out);
  EXPECT_EQ(j["symmetric_difference"], 0);
  EXPECT_EQ(j["jaccard"], 1.0);
  EXPECT_GT(j["records_a"].get<int>(), 0);
  EXPECT_EQ(slurp(f("r.csv")), slurp(f("o.csv")));
  EXPECT_TRUE(json::parse(slurp(f("sum.json")))["generations"].is_array());
}

TEST_F(Fixture, RescueModeNeedsTable) {
  ASSERT_EQ(cli({"learn", "--edges", f("edges.csv"), "--snapshot", f("plain.bin"), "--depth-exp",
                 "12"})
                .code,
            0);
  CliRun t = cli({"trace", "--snapshot", f("plain.bin"), "--edges", f("edges.csv"), "--starts",
               f("starts.txt"), "--mode", "rescue", "--out", f("r.csv")});
  EXPECT_EQ(t.code, 2);
  t = cli({"trace", "--snapshot", f("plain.bin"), "--edges", f("edges.csv"), "--starts",
           f("starts.txt"), "--out", f("dc.csv")});
  EXPECT_EQ(t.code, 0) << t.err;
}

TEST_F(Fixture, AnalyzeWritesArtifacts) {
  ASSERT_EQ(cli({"oracle", "--edges", f("edges.csv"), "--starts", f("starts.txt"), "--out",
                 f("o.csv")})
                .code,
            0);
  CliRun a = cli({"analyze", "--records", f("o.csv"), "--predicates", f("preds.csv"),
               "--concept-members", "mathematics,physics", "--pivot", "1800", "--out-giant",
               f("giant.csv"), "--out-json", f("analysis.json"), "--out-bars", f("bars.txt")});
  ASSERT_EQ(a.code, 0) << a.err;
  std::string giant = slurp(f("giant.csv"));
  EXPECT_EQ(giant.substr(0, giant.find('\n')), "node,s,s_hat,t_hat,g,paths");
  auto j = json::parse(slurp(f("analysis.json")));
  EXPECT_TRUE(j.contains("windows"));
  EXPECT_TRUE(j.contains("profiles"));
  EXPECT_TRUE(j.contains("indicators"));
  EXPECT_TRUE(j.contains("bounds"));
  EXPECT_FALSE(slurp(f("bars.txt")).empty());
  CliRun missing = cli({"analyze", "--records", f("o.csv"), "--predicates", f("preds.csv")});
  EXPECT_EQ(missing.code, 1);
}

TEST_F(Fixture, SweepReportsFiveConfigs) {
  CliRun s = cli({"sweep", "--edges", f("edges.csv"), "--starts", f("starts.txt"), "--fs", "20",
               "--segment-bits", "32", "--out", f("sweep.json")});
  ASSERT_EQ(s.code, 0) << s.err;
  auto j = json::parse(slurp(f("sweep.json")));
  ASSERT_EQ(j["configs"].size(), 5u);
  for (const auto& row : j["configs"]) {
    EXPECT_TRUE(row["collisions"].contains("location_rate"));
    EXPECT_TRUE(row["collisions"].contains("count_rate"));
    EXPECT_TRUE(row["top"].is_array());
    EXPECT_TRUE(row["trajectory"].is_array());
  }
  CliRun bad = cli({"sweep", "--edges", f("edges.csv"), "--starts", f("starts.txt"), "--sweep",
                 "64:20,128:20"});
  EXPECT_EQ(bad.code, 1);
}

TEST_F(Fixture, SeedPrecedence) {
  auto edges_with = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"gen-dag", "--nodes", "100", "--out-edges", f("x.csv"),
                                  "--out-predicates", f("xp.csv"), "--out-starts", f("xs.txt")};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(cli(args).code, 0);
    return slurp(f("x.csv"));
  };
  {
    std::ofstream os(f("s5.cfg"));
    os << "seed = 5\n";
  }
  std::string s5 = edges_with({"--seed", "5"});
  std::string s6 = edges_with({"--seed", "6"});
  ASSERT_NE(s5, s6);
  EXPECT_EQ(edges_with({"--config", f("s5.cfg")}), s5);
  setenv("VACOAL_SEED", "6", 1);
  EXPECT_EQ(edges_with({"--config", f("s5.cfg")}), s6);
  EXPECT_EQ(edges_with({"--config", f("s5.cfg"), "--seed", "5"}), s5);
  unsetenv("VACOAL_SEED");
}

TEST_F(Fixture, ErrorExitCodesAndJson) {
  CliRun r = cli({"trace", "--snapshot", f("nope.bin"), "--edges", f("edges.csv"), "--starts",
               f("starts.txt")});
  EXPECT_EQ(r.code, 2);
  auto j = json::parse(r.err);
  EXPECT_EQ(j["kind"], "io");
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_TRUE(j.contains("message"));

  EXPECT_EQ(cli({"oracle", "--edges", f("edges.csv"), "--starts", f("starts.txt"), "--fs", "0"})
                .code,
            1);
  EXPECT_EQ(cli({"learn", "--edges", f("edges.csv"), "--snapshot", f("m.bin"), "--dim", "1000"})
                .code,
            1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"oracle", "--bogus", "1"}).code, 1);
  {
    std::ofstream os(f("ghost.txt"));
    os << "ghost\n";
  }
  r = cli({"oracle", "--edges", f("edges.csv"), "--starts", f("ghost.txt")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"], "unknown_node");
  r = cli({"bounds", "--blocks", "1"});
  EXPECT_EQ(r.code, 3);
  {
    std::ofstream os(f("broken.csv"));
    os << "student,mentor\n\"unterminated,x\n";
  }
  EXPECT_EQ(cli({"ingest", "--edges", f("broken.csv")}).code, 2);
}

TEST(Cli, BoundsOutput) {
  CliRun r = cli({"bounds", "--blocks", "128", "--depth-exp", "20", "--cr1", "0.997", "--gens", "56"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["cr2_prediction"].get<double>(), 0.846, 0.001);
  EXPECT_EQ(j["N"], 128);
}

#ifdef HDCAM_CLI_PATH
TEST(Cli, BinaryRunsAndHonoursEnvSeed) {
  TempDir dir("clibin");
  std::string cmd = std::string("VACOAL_SEED=3 ") + HDCAM_CLI_PATH + " gen-dag --nodes 50" +
                    " --out-edges " + dir.file("e.csv") + " --out-predicates " +
                    dir.file("p.csv") + " --out-starts " + dir.file("s.txt") + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  ASSERT_EQ(cli({"gen-dag", "--nodes", "50", "--seed", "3", "--out-edges", dir.file("e3.csv"),
                 "--out-predicates", dir.file("p3.csv"), "--out-starts", dir.file("s3.txt")})
                .code,
            0);
  EXPECT_EQ(slurp(dir.file("e.csv")), slurp(dir.file("e3.csv")));
  std::string fail = std::string(HDCAM_CLI_PATH) + " bounds --blocks 1 2> /dev/null";
  int status = std::system(fail.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 3);
}
#endif

}  // namespace
}  // namespace hdcam
