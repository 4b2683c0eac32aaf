#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "dcell/io.hpp"

namespace dcell::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dcell_cli_" + name)).string();
}

TEST(Cli, GenEdgeList) {
  const Result r = call({"gen", "--n", "2", "--k", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Topology g = parse_edge_list(r.out);
  EXPECT_EQ(g.vertex_count(), 6u);
  EXPECT_EQ(g.edge_count(), 6u);
}

TEST(Cli, GenJsonToFile) {
  const std::string path = temp("gen.json");
  ASSERT_EQ(call({"gen", "--n", "3", "--k", "1", "--format", "json", "--out", path}).code,
            kExitOk);
  const Json doc = Json::parse(read_file(path));
  const Topology g = build_graph({3, 1});
  EXPECT_EQ(doc["t"], g.vertex_count());
  EXPECT_EQ(doc["edges"].size(), g.edge_count());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "2"}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "2", "--k", "1", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(call({"gen", "--n", "2", "--k", "1", "--format", "png"}).code, kExitUsage);
  EXPECT_EQ(call({"--help"}).code, kExitOk);
}

TEST(Cli, ParameterErrorsAreJson) {
  const Result r = call({"hp", "--n", "2", "--k", "1", "--u", "0", "--v", "1"});
  EXPECT_EQ(r.code, kExitParameter);
  const Json doc = Json::parse(r.err);
  EXPECT_TRUE(doc.contains("error"));
  EXPECT_TRUE(doc.contains("message"));
  EXPECT_EQ(call({"gen", "--n", "1", "--k", "1"}).code, kExitParameter);
  EXPECT_EQ(call({"--max-vertices", "10", "gen", "--n", "3", "--k", "1"}).code,
            kExitParameter);
}

TEST(Cli, HpVerifies) {
  const Result r = call({"hp", "--n", "3", "--k", "2", "--u", "0", "--v", "100", "--verify",
                         "--count-ops"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_TRUE(doc["valid"].get<bool>());
  EXPECT_EQ(doc["vertices"].size(), 156u);
  EXPECT_GT(doc["ops"]["calls"].get<int>(), 0);
}

TEST(Cli, FaultTolerant) {
  const std::string path = temp("faults.json");
  write_file(path, R"({"vertices": [5]})");
  const Result hp = call({"ft-hp", "--n", "4", "--k", "1", "--faults", path, "--u", "2",
                          "--v", "9", "--trace"});
  ASSERT_EQ(hp.code, kExitOk) << hp.err;
  const Json doc = Json::parse(hp.out);
  EXPECT_TRUE(doc["valid"].get<bool>());
  EXPECT_EQ(doc["vertices"].size(), 19u);
  EXPECT_TRUE(doc["trace"].is_array());
  const Result hc = call({"ft-hc", "--n", "4", "--k", "1", "--faults", path});
  ASSERT_EQ(hc.code, kExitOk) << hc.err;
  EXPECT_EQ(call({"ft-hc", "--n", "4", "--k", "1", "--faults", temp("missing")}).code,
            kExitParameter);
}

TEST(Cli, Oracle) {
  const Result r = call({"oracle", "hp", "--n", "2", "--k", "1", "--u", "0", "--v", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(Json::parse(r.out)["found"].get<bool>());
  const Result f = call({"oracle", "fault-check", "--n", "3", "--k", "1", "--f", "1",
                         "--mode", "hc"});
  ASSERT_EQ(f.code, kExitOk) << f.err;
  EXPECT_TRUE(Json::parse(f.out)["ok"].get<bool>());
  // One fault on a 6-cycle breaks it.
  const Result g = call({"oracle", "fault-check", "--n", "2", "--k", "1", "--f", "1"});
  EXPECT_EQ(g.code, kExitFailure);
  EXPECT_FALSE(Json::parse(g.out)["counterexample"].empty());
}

TEST(Cli, OracleCertify) {
  const Result r = call({"oracle", "certify"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int passed = 0;
  while (std::getline(lines, line)) passed += line.rfind("PASS ", 0) == 0 ? 1 : 0;
  EXPECT_EQ(passed, 4);
}

TEST(Cli, PartialNext) {
  const std::string path = temp("listing.json");
  const Result r = call({"partial", "next", "--shape", "3,3,2", "--steps", "4", "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Listing l({3, 3, 2});
  std::string expected;
  for (int i = 0; i < 4; ++i) {
    const Tuple a = l.next();
    expected += std::to_string(a[0]) + '.' + std::to_string(a[1]) + '.' +
                std::to_string(a[2]) + '\n';
  }
  EXPECT_EQ(r.out, expected);
  const Tuple a = l.next();
  const Result more = call({"partial", "next", "--shape", "3,3,2", "--from", path});
  EXPECT_EQ(more.out, std::to_string(a[0]) + '.' + std::to_string(a[1]) + '.' +
                          std::to_string(a[2]) + '\n');
  EXPECT_EQ(call({"partial", "next", "--shape", "3,0"}).code, kExitParameter);
}

TEST(Cli, PartialCheckAndHp) {
  const Result c = call({"partial", "check", "--n", "4", "--k", "2", "--d", "7", "--c", "5"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  // Each deployed unit is a DCell_1.
  const std::uint64_t size = 7 * t(4, 1);
  EXPECT_EQ(Json::parse(c.out)["vertices"], size);
  const Result h = call({"partial", "hp", "--n", "4", "--k", "2", "--d", "7", "--c", "5",
                         "--u", "0", "--v", std::to_string(size - 1)});
  ASSERT_EQ(h.code, kExitOk) << h.err;
  EXPECT_EQ(Json::parse(h.out)["vertices"].size(), size);
}

TEST(Cli, Broadcast) {
  const Result r = call({"bcast", "--n", "2", "--k", "1", "--scheme", "flood"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["per_trial"][0]["messages"], 7);
  const Result e = call({"bcast", "--n", "2", "--k", "1", "--p", "0.1", "--trials", "100",
                         "--fixed-cycle-experiment"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_EQ(Json::parse(e.out)["trials"], 100);
  EXPECT_EQ(call({"bcast", "--n", "2", "--k", "1", "--p", "2"}).code, kExitParameter);
}

TEST(Cli, Bench) {
  const Result r = call({"bench", "--pairs", "2:2,2:3,3:1", "--json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json rows = Json::parse(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["t_k"], 42);
  EXPECT_EQ(rows[2]["t_k"], 12);
  const double a = rows[0]["calls_per_vertex"];
  const double b = rows[1]["calls_per_vertex"];
  EXPECT_LE(std::abs(b - a) / a, 0.10);
  const Result empty = call({"bench", "--pairs", ""});
  EXPECT_EQ(empty.code, kExitOk);
  EXPECT_EQ(empty.out.find('\n'), empty.out.size() - 1);
}

}  // namespace
}  // namespace dcell::cli
