#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cne/cli.hpp"
#include "cne/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cne;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cnesens");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("cne_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
    setenv("CNE_DATA_DIR", CNE_TEST_DATA_DIR, 1);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }
  std::string karate() const { return (fs::path(CNE_TEST_DATA_DIR) / "karate.edgelist").string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpAndVersionSucceed) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, cli::kExitOk);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
}

TEST_F(CliTest, EmbedKarateWritesOutputs) {
  const auto r = run({"embed", karate(), "--out", path("e").string(), "--write-probs"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(path("e") / "embedding.csv"));
  EXPECT_TRUE(fs::exists(path("e") / "probabilities.csv"));
  const auto diag = nlohmann::json::parse(slurp(path("e") / "diagnostics.json"));
  EXPECT_TRUE(diag["converged"].get<bool>());
  const auto man = nlohmann::json::parse(slurp(path("e") / "manifest.json"));
  EXPECT_EQ(man["command"], "embed");
  EXPECT_EQ(man["dataset"]["fnv1a64"], io::hex64(io::hash_file(karate())));
  EXPECT_GE(man["outputs"].size(), 3u);
}

TEST_F(CliTest, DatasetNameResolvesThroughDataDir) {
  const auto r = run({"embed", "karate", "--out", path("e").string()});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
}

TEST_F(CliTest, MissingFileIsUsageErrorNamingPath) {
  const auto r = run({"embed", "/no/such/graph.txt", "--out", path("e").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("/no/such/graph.txt"), std::string::npos);
}

TEST_F(CliTest, MalformedGraphReportsLine) {
  io::write_file(path("bad.txt"), "1 2\n3\n");
  const auto r = run({"embed", path("bad.txt").string(), "--out", path("e").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, SameSeedGivesIdenticalEmbedding) {
  ASSERT_EQ(run({"embed", karate(), "--seed", "5", "--out", path("a").string()}).code, 0);
  ASSERT_EQ(run({"embed", karate(), "--seed", "5", "--out", path("b").string()}).code, 0);
  EXPECT_EQ(slurp(path("a") / "embedding.csv"), slurp(path("b") / "embedding.csv"));
}

TEST_F(CliTest, RankReTopFive) {
  const auto r = run({"rank", karate(), "--method", "re", "--top", "5", "--out",
                      path("r").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto ranking = io::read_ranking_csv_file(path("r") / "ranking.csv");
  ASSERT_EQ(ranking.items.size(), 5u);
  EXPECT_EQ(ranking.method, Method::RE);
  EXPECT_TRUE(ranking.items[0].disconnects);
  EXPECT_NE(ranking.embedding_hash, 0u);
}

TEST_F(CliTest, UnknownMethodIsUsageError) {
  const auto r = run({"rank", karate(), "--method", "magic", "--out", path("r").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("magic"), std::string::npos);
}

TEST_F(CliTest, EmptySelectionWarnsAndSucceeds) {
  io::write_file(path("k4.txt"), "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
  const auto r = run({"rank", path("k4.txt").string(), "--only", "add", "--prior", "0.5", "--out",
                      path("r").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_TRUE(io::read_ranking_csv_file(path("r") / "ranking.csv").items.empty());
}

TEST_F(CliTest, CompareIdenticalRankingsGivesOne) {
  ASSERT_EQ(run({"rank", karate(), "--out", path("r").string()}).code, 0);
  const auto csv = (path("r") / "ranking.csv").string();
  const auto r = run({"compare", csv, csv, "--samples", "50", "--out", path("c").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(path("c") / "comparison.json"));
  EXPECT_EQ(j["ndcg"].get<double>(), 1.0);
}

TEST_F(CliTest, CompareMismatchedFlipSetsIsUsageError) {
  ASSERT_EQ(run({"rank", karate(), "--only", "del", "--out", path("d").string()}).code, 0);
  ASSERT_EQ(run({"rank", karate(), "--only", "add", "--out", path("a").string()}).code, 0);
  const auto r = run({"compare", (path("d") / "ranking.csv").string(),
                      (path("a") / "ranking.csv").string(), "--out", path("c").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("only in ground truth"), std::string::npos);
}

TEST_F(CliTest, ReproduceMissingDatasetGivesInstructions) {
  const auto r = run({"reproduce", "t4", "--datasets", "nosuchset", "--out", path("p").string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("missing dataset 'nosuchset'"), std::string::npos);
  EXPECT_NE(r.err.find("CNE_DATA_DIR"), std::string::npos);
}

TEST_F(CliTest, ReproduceKarateTableOne) {
  const auto r = run({"reproduce", "t1", "--out", path("p").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto text = slurp(path("p") / "reproduce_t1.csv");
  EXPECT_EQ(text.rfind("table,dataset,row,quantity,reference,reproduced,agree\n", 0), 0u);
  const auto man = nlohmann::json::parse(slurp(path("p") / "manifest.json"));
  EXPECT_EQ(man["argv"].size(), 5u);
}

TEST(ReferenceValues, ParsesRows) {
  std::istringstream in("# comment\nt1,1,karate,re,pair,1 12\n");
  const auto v = cli::load_reference_values(in);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].table, "t1");
  EXPECT_EQ(v[0].row, 1);
  EXPECT_EQ(v[0].value, "1 12");
}

TEST(ReferenceValues, ShippedFileLoads) {
  const auto v = cli::load_reference_values_file(fs::path(CNE_TEST_DATA_DIR) /
                                                 "reference_values.csv");
  EXPECT_GT(v.size(), 20u);
}
