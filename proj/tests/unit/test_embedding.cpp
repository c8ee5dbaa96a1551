#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cne/embedding.hpp"
#include "oracles.hpp"

using namespace cne;

namespace {

EmbeddingConfig with_prior(double pi) {
  EmbeddingConfig c;
  c.prior_pi = pi;
  return c;
}

double max_rel_error(const Embedding& a, const Embedding& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    const double x = a.values()[k], y = b.values()[k];
    m = std::max(m, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-4}));
  }
  return m;
}

}  // namespace

TEST(EmbeddingConfig, GammaFromSpreads) {
  EmbeddingConfig c;
  EXPECT_DOUBLE_EQ(c.gamma(), 0.75);
  c.sigma2 = 3.0;
  EXPECT_DOUBLE_EQ(c.gamma(), 1.0 - 1.0 / 9.0);
}

TEST(EmbeddingConfig, ValidateRejectsBadValues) {
  EmbeddingConfig c;
  c.dim = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.sigma2 = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.prior_pi = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(EmbeddingConfig, PriorDefaultsToDensity) {
  const auto g = oracle::karate();
  const auto r = resolve_prior(EmbeddingConfig{}, g);
  ASSERT_TRUE(r.prior_pi.has_value());
  EXPECT_DOUBLE_EQ(*r.prior_pi, 78.0 / 561.0);
  EXPECT_DOUBLE_EQ(*resolve_prior(with_prior(0.3), g).prior_pi, 0.3);
}

TEST(LinkProbability, CoincidentEvenPrior) {
  const double x[2] = {0.4, -1.0};
  EXPECT_NEAR(link_probability(x, x, with_prior(0.5)), 2.0 / 3.0, 1e-15);
}

TEST(LinkProbability, MatchesBayesRatio) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pis(0.01, 0.9);
  std::normal_distribution<double> coord(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double pi = pis(rng);
    const double a[3] = {coord(rng), coord(rng), coord(rng)};
    const double b[3] = {coord(rng), coord(rng), coord(rng)};
    const double dist = std::sqrt(std::pow(a[0] - b[0], 2) + std::pow(a[1] - b[1], 2) +
                                  std::pow(a[2] - b[2], 2));
    const double p = link_probability(a, b, with_prior(pi));
    EXPECT_NEAR(p, oracle::bayes_ratio(dist, 1.0, 2.0, pi), 1e-12);
    EXPECT_EQ(p, link_probability(b, a, with_prior(pi)));
  }
}

TEST(LinkProbability, DecreasesWithDistance) {
  double prev = 1.0;
  for (double r = 0.0; r < 6.0; r += 0.25) {
    const double a[1] = {0.0}, b[1] = {r};
    const double p = link_probability(a, b, with_prior(0.2));
    EXPECT_LT(p, prev);
    EXPECT_GT(p, 0.0);
    prev = p;
  }
}

TEST(LogLikelihood, MatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto g = oracle::random_graph(9, 0.35, rng);
    const auto x = oracle::random_coords(9, 3, rng);
    const auto cfg = resolve_prior(EmbeddingConfig{}, g);
    const double ref = oracle::log_likelihood(oracle::adjacency(g), x, cfg);
    EXPECT_NEAR(log_likelihood(g, x, cfg), ref, 1e-10 * std::abs(ref));
  }
}

TEST(LogLikelihood, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (std::size_t d : {1u, 2u, 4u}) {
    const auto g = oracle::random_graph(10, 0.3, rng);
    const auto x = oracle::random_coords(10, d, rng);
    const auto cfg = resolve_prior(EmbeddingConfig{}, g);
    const auto num = oracle::numeric_gradient(oracle::adjacency(g), x, cfg);
    EXPECT_LT(max_rel_error(log_likelihood_gradient(g, x, cfg), num), 1e-6);
  }
}

TEST(LogLikelihood, GradientMatchesClosedFormRow) {
  std::mt19937_64 rng(8);
  const auto g = oracle::random_graph(12, 0.25, rng);
  const auto x = oracle::random_coords(12, 2, rng);
  const auto cfg = resolve_prior(EmbeddingConfig{}, g);
  const auto grad = log_likelihood_gradient(g, x, cfg);
  const auto adj = oracle::adjacency(g);
  for (std::size_t k = 0; k < 12; ++k) {
    const auto row = oracle::row_gradient(adj, x, cfg, k);
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(grad(k, c), row[c], 1e-12);
  }
}

TEST(LogLikelihood, GradientVanishesWhenNodesCoincide) {
  const auto g = Graph::from_edges(4, {{0, 1}, {2, 3}});
  Embedding x(4, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    x(k, 0) = 0.7;
    x(k, 1) = -0.2;
  }
  const auto grad = log_likelihood_gradient(g, x, EmbeddingConfig{});
  for (double v : grad.values()) EXPECT_EQ(v, 0.0);
}

TEST(LogLikelihood, LinkedPairIsPulledTogether) {
  const auto g = Graph::from_edges(3, {{0, 1}});
  Embedding x(3, 1);
  x(0, 0) = -3.0;
  x(1, 0) = 3.0;
  x(2, 0) = 0.0;
  const auto grad = log_likelihood_gradient(g, x, EmbeddingConfig{});
  EXPECT_GT(grad(0, 0), 0.0);
  EXPECT_LT(grad(1, 0), 0.0);
}

TEST(Embed, ZeroIterationsReturnsStart) {
  const auto g = oracle::karate();
  EmbeddingConfig cfg;
  cfg.max_iter = 0;
  const auto start = random_embedding(34, 2, 99);
  const auto r = embed(g, cfg, start);
  EXPECT_EQ(r.coords, start);
  EXPECT_EQ(r.diagnostics.iterations, 0u);
}

TEST(Embed, WarmStartAtOptimumStaysPut) {
  const auto g = oracle::karate();
  EmbeddingConfig cfg;
  cfg.ftol = 0.0;
  cfg.max_iter = 5000;
  const auto a = embed(g, cfg);
  const auto b = embed(g, cfg, a.coords);
  EXPECT_LT(max_rel_error(a.coords, b.coords), 1e-6);
}

TEST(Embed, ShapeMismatchRejected) {
  EXPECT_THROW(embed(oracle::karate(), EmbeddingConfig{}, Embedding(34, 3)),
               std::invalid_argument);
  EXPECT_THROW(embed(Graph::from_edges(1, {}), EmbeddingConfig{}), std::invalid_argument);
}

TEST(Embed, BeatsRandomEmbeddingsOnPath) {
  const auto g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto r = embed(g, EmbeddingConfig{});
  const auto adj = oracle::adjacency(g);
  const double best = oracle::log_likelihood(adj, r.coords, r.config);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_coords(4, 2, rng, 2.0);
    EXPECT_GE(best, oracle::log_likelihood(adj, x, r.config));
  }
}

TEST(Embed, ObjectiveTraceIsMonotone) {
  const auto r = embed(oracle::karate(), EmbeddingConfig{});
  const auto& tr = r.diagnostics.objective_trace;
  ASSERT_GE(tr.size(), 2u);
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_GE(tr[k], tr[k - 1]);
  EXPECT_DOUBLE_EQ(tr.back(), r.diagnostics.final_objective);
}

TEST(Embed, KarateConvergesWithReferenceSettings) {
  const auto r = embed(oracle::karate(), EmbeddingConfig{});
  EXPECT_TRUE(r.diagnostics.converged);
  EXPECT_LE(r.diagnostics.iterations, 2000u);
  EXPECT_TRUE(r.coords.all_finite());
  EXPECT_EQ(r.probs.size(), 34u);
}

TEST(Embed, DeterministicPerSeed) {
  const auto g = oracle::karate();
  EmbeddingConfig cfg;
  cfg.seed = 5;
  const auto a = embed(g, cfg);
  const auto b = embed(g, cfg);
  EXPECT_EQ(a.coords, b.coords);
  cfg.seed = 6;
  EXPECT_NE(embed(g, cfg).coords, a.coords);
}

TEST(Embed, LinkedPairsSitCloser) {
  const auto g = oracle::karate();
  const auto r = embed(g, EmbeddingConfig{});
  double in = 0.0, out = 0.0;
  std::size_t ni = 0, no = 0;
  for (NodeId k = 0; k < 34; ++k) {
    for (NodeId l = k + 1; l < 34; ++l) {
      const double d = oracle::distance(r.coords, k, l);
      if (g.has_edge(k, l)) {
        in += d;
        ++ni;
      } else {
        out += d;
        ++no;
      }
    }
  }
  EXPECT_LT(in / static_cast<double>(ni), out / static_cast<double>(no));
}

TEST(Embed, ProbabilityMatrixMatchesOracle) {
  const auto g = oracle::karate();
  const auto r = embed(g, EmbeddingConfig{});
  const auto ref = oracle::probabilities(r.coords, r.config);
  for (std::size_t k = 0; k < 34; ++k)
    for (std::size_t l = 0; l < 34; ++l)
      if (k != l) EXPECT_NEAR(r.probs(k, l), ref[k][l], 1e-12);
}

TEST(Embed, FactionsSeparateAlongFittedCoordinates) {
  // Within-faction pairs get higher mean link probability than cross pairs.
  const auto g = oracle::karate();
  const auto f = oracle::karate_factions();
  const auto r = embed(g, EmbeddingConfig{});
  double within = 0.0, cross = 0.0;
  std::size_t nw = 0, nc = 0;
  for (NodeId k = 0; k < 34; ++k)
    for (NodeId l = k + 1; l < 34; ++l) {
      if (f[k] == f[l]) {
        within += r.probs(k, l);
        ++nw;
      } else {
        cross += r.probs(k, l);
        ++nc;
      }
    }
  EXPECT_GT(within / static_cast<double>(nw), 2.0 * cross / static_cast<double>(nc));
}
