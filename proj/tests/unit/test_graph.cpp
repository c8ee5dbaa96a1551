#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cne/graph.hpp"
#include "cne/sensitivity.hpp"
#include "oracles.hpp"

using namespace cne;

namespace {

Graph load(const std::string& text, EdgeListFormat fmt = EdgeListFormat::Auto) {
  std::istringstream in(text);
  return load_edge_list(in, fmt).graph;
}

}  // namespace

TEST(GraphLoad, KarateShape) {
  const auto g = oracle::karate();
  EXPECT_EQ(g.num_nodes(), 34u);
  EXPECT_EQ(g.num_edges(), 78u);
  EXPECT_EQ(g.num_pairs(), 561u);
  EXPECT_EQ(g.label(0), "1");
  EXPECT_EQ(g.label(33), "34");
}

TEST(GraphLoad, CommentsExtraColumnsAndCommas) {
  const auto a = load("# header\n% other comment\n1 2 0.5\n2 3 7 extra\n\n");
  const auto b = load("1,2\n2,3\n", EdgeListFormat::Comma);
  EXPECT_EQ(a.num_nodes(), 3u);
  EXPECT_EQ(a, b);
}

TEST(GraphLoad, DropsDuplicatesAndSelfLoops) {
  std::istringstream in("1 2\n2 1\n1 2\n3 3\n2 3\n");
  const auto r = load_edge_list(in);
  EXPECT_EQ(r.graph.num_edges(), 2u);
  EXPECT_EQ(r.report.duplicates_dropped, 2u);
  EXPECT_EQ(r.report.self_loops_dropped, 1u);
}

TEST(GraphLoad, NumericLabelsSortNumerically) {
  const auto g = load("10 2\n2 1\n");
  EXPECT_EQ(g.label(0), "1");
  EXPECT_EQ(g.label(1), "2");
  EXPECT_EQ(g.label(2), "10");
  EXPECT_EQ(g.find_label("10"), 2);
  EXPECT_EQ(g.find_label("7"), -1);
}

TEST(GraphLoad, SymbolicLabels) {
  const auto g = load("bob alice\nalice carol\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.label(0), "alice");
  EXPECT_TRUE(g.has_edge(0, 1));
}

TEST(GraphLoad, MalformedLineReportsLineNumber) {
  std::istringstream in("1 2\n3\n");
  try {
    load_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(GraphLoad, EmptyInputFails) {
  std::istringstream in("# nothing\n");
  EXPECT_THROW(load_edge_list(in), ParseError);
}

TEST(GraphLoad, MissingFileNamesPath) {
  try {
    load_edge_list_file("/no/such/graph.txt");
    FAIL() << "expected FileError";
  } catch (const FileError& e) {
    EXPECT_NE(std::string(e.what()).find("/no/such/graph.txt"), std::string::npos);
  }
}

TEST(GraphLoad, SaveRoundTrip) {
  const auto g = oracle::karate();
  std::ostringstream out;
  save_edge_list(out, g);
  const auto h = load(out.str());
  EXPECT_EQ(g, h);
  EXPECT_EQ(g.labels(), h.labels());
}

TEST(Graph, FromEdgesRejectsBadInput) {
  EXPECT_THROW(Graph::from_edges(3, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph::from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph::from_edges(2, {{0, 5}}), std::invalid_argument);
}

TEST(Graph, NeighborsAndDegree) {
  const auto g = Graph::from_edges(4, {{2, 0}, {0, 1}, {3, 0}});
  ASSERT_EQ(g.degree(0), 3u);
  const auto nb = g.neighbors(0);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(g.degree(1), 1u);
  EXPECT_DOUBLE_EQ(g.density(), 3.0 / 6.0);
}

TEST(Graph, Communities) {
  const auto g = load("a b\nb c\nc d\n");
  std::istringstream in("# x\na L\nb L\nd C\n");
  const auto c = load_communities(in, g);
  EXPECT_EQ(c, (std::vector<int>{0, 0, -1, 1}));
}

TEST(Graph, KarateFactionsAreTwo) {
  const auto f = oracle::karate_factions();
  ASSERT_EQ(f.size(), 34u);
  EXPECT_EQ(std::count(f.begin(), f.end(), 0) + std::count(f.begin(), f.end(), 1), 34);
  EXPECT_NE(f[0], f[33]);
}

TEST(Graph, LargestComponentTieBreak) {
  // Components {0,1}, {2,3}, {4}: the tie goes to the one holding node 0.
  const auto g = Graph::from_edges(5, {{2, 3}, {0, 1}}, {"a", "b", "c", "d", "e"});
  const auto lcc = largest_connected_component(g);
  EXPECT_EQ(lcc.num_nodes(), 2u);
  EXPECT_EQ(lcc.label(0), "a");
  EXPECT_EQ(lcc.label(1), "b");

  const auto h = Graph::from_edges(5, {{3, 4}, {2, 3}, {0, 1}});
  const auto big = largest_connected_component(h);
  EXPECT_EQ(big.num_nodes(), 3u);
  EXPECT_EQ(big.label(0), "2");
  EXPECT_TRUE(big.has_edge(0, 1) && big.has_edge(1, 2));
}

TEST(Graph, FlipInvolution) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto g = oracle::random_graph(12, 0.3, rng);
    std::uniform_int_distribution<NodeId> pick(0, 11);
    NodeId i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const auto f = make_flip(g, i, j);
    EXPECT_LT(f.i, f.j);
    const auto once = flip_edge(g, f);
    EXPECT_NE(once.has_edge(f.i, f.j), g.has_edge(f.i, f.j));
    EXPECT_EQ(flip_edge(once, make_flip(once, i, j)), g);
  }
}

TEST(Graph, MakeFlipRejectsSelfPair) { EXPECT_THROW(make_flip(oracle::karate(), 3, 3), InvalidFlip); }

TEST(Graph, IsBridgeRejectsAddition) {
  const auto g = oracle::karate();
  EXPECT_THROW(is_bridge(g, make_flip(g, 0, 33)), ContractViolation);
}

TEST(Graph, BridgesMatchBruteForce) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 5 + t % 46;
    const auto g = oracle::random_graph(n, 2.5 / static_cast<double>(n), rng);
    const auto bridges = find_bridges(g);
    for (const auto& e : g.edges()) {
      const bool brute = oracle::disconnects_after_removal(g, e.u, e.v);
      EXPECT_EQ(is_bridge(g, make_flip(g, e.u, e.v)), brute);
      EXPECT_EQ(std::binary_search(bridges.begin(), bridges.end(), e), brute);
    }
  }
}

TEST(Graph, KarateBridgeIsOneTwelve) {
  const auto g = oracle::karate();
  const auto b = find_bridges(g);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(g.label(b[0].u), "1");
  EXPECT_EQ(g.label(b[0].v), "12");
}

TEST(Graph, EnumerateFlipsCounts) {
  const auto g = oracle::karate();
  const auto flips = enumerate_flips(g);
  EXPECT_EQ(flips.size(), 561u);
  EXPECT_EQ(std::count_if(flips.begin(), flips.end(),
                          [](const EdgeFlip& f) { return f.direction == FlipDirection::Deletion; }),
            78);
  const auto two = Graph::from_edges(2, {{0, 1}});
  ASSERT_EQ(enumerate_flips(two).size(), 1u);
  EXPECT_EQ(enumerate_flips(two)[0].direction, FlipDirection::Deletion);
}
