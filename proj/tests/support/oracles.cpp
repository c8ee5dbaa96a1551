#include "oracles.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

double half_normal(double d, double s) {
  return std::sqrt(2.0 / std::numbers::pi) / s * std::exp(-d * d / (2.0 * s * s));
}

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

double prior_of(const Matrix& adj, const cne::EmbeddingConfig& cfg) {
  if (cfg.prior_pi) return *cfg.prior_pi;
  double e = 0.0;
  const std::size_t n = adj.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) e += adj[k][l];
  return e / (0.5 * static_cast<double>(n * (n - 1)));
}

}  // namespace

double bayes_ratio(double dist, double sigma1, double sigma2, double pi) {
  const double a = pi * half_normal(dist, sigma1);
  const double b = (1.0 - pi) * half_normal(dist, sigma2);
  return a / (a + b);
}

double distance(const cne::Embedding& x, std::size_t k, std::size_t l) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.dim(); ++c) s += (x(k, c) - x(l, c)) * (x(k, c) - x(l, c));
  return std::sqrt(s);
}

Matrix probabilities(const cne::Embedding& x, const cne::EmbeddingConfig& cfg) {
  const std::size_t n = x.num_nodes();
  Matrix p(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if (k != l) p[k][l] = bayes_ratio(distance(x, k, l), cfg.sigma1, cfg.sigma2, *cfg.prior_pi);
  return p;
}

double log_likelihood(const Matrix& adj, const cne::Embedding& x,
                      const cne::EmbeddingConfig& cfg) {
  const double pi = prior_of(adj, cfg);
  double s = 0.0;
  for (std::size_t k = 0; k < x.num_nodes(); ++k) {
    for (std::size_t l = k + 1; l < x.num_nodes(); ++l) {
      const double p = bayes_ratio(distance(x, k, l), cfg.sigma1, cfg.sigma2, pi);
      s += adj[k][l] * std::log(p) + (1.0 - adj[k][l]) * std::log(1.0 - p);
    }
  }
  return s;
}

Matrix adjacency(const cne::Graph& g) {
  Matrix a(g.num_nodes(), std::vector<double>(g.num_nodes(), 0.0));
  for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1.0;
  return a;
}

cne::Embedding numeric_gradient(const Matrix& adj, const cne::Embedding& x,
                                const cne::EmbeddingConfig& cfg, double h) {
  cne::Embedding g(x.num_nodes(), x.dim());
  cne::Embedding y = x;
  for (std::size_t k = 0; k < x.num_nodes(); ++k) {
    for (std::size_t c = 0; c < x.dim(); ++c) {
      y(k, c) = x(k, c) + h;
      const double up = log_likelihood(adj, y, cfg);
      y(k, c) = x(k, c) - h;
      const double dn = log_likelihood(adj, y, cfg);
      y(k, c) = x(k, c);
      g(k, c) = (up - dn) / (2.0 * h);
    }
  }
  return g;
}

std::vector<double> row_gradient(const Matrix& adj, const cne::Embedding& x,
                                 const cne::EmbeddingConfig& cfg, std::size_t k) {
  // d/dx_k log P = -(1 - P) gamma (x_k - x_l); d/dx_k log(1 - P) = P gamma (x_k - x_l).
  const double pi = prior_of(adj, cfg);
  const double gamma = 1.0 / (cfg.sigma1 * cfg.sigma1) - 1.0 / (cfg.sigma2 * cfg.sigma2);
  std::vector<double> g(x.dim(), 0.0);
  for (std::size_t l = 0; l < x.num_nodes(); ++l) {
    if (l == k) continue;
    const double p = bayes_ratio(distance(x, k, l), cfg.sigma1, cfg.sigma2, pi);
    const double w = adj[k][l] * (-(1.0 - p)) + (1.0 - adj[k][l]) * p;
    for (std::size_t c = 0; c < x.dim(); ++c) g[c] += w * gamma * (x(k, c) - x(l, c));
  }
  return g;
}

Matrix numeric_row_jacobian(const Matrix& adj, const cne::Embedding& x,
                            const cne::EmbeddingConfig& cfg, std::size_t k, double h) {
  const std::size_t d = x.dim();
  Matrix j(d, std::vector<double>(d, 0.0));
  cne::Embedding y = x;
  for (std::size_t c = 0; c < d; ++c) {
    y(k, c) = x(k, c) + h;
    const auto up = row_gradient(adj, y, cfg, k);
    y(k, c) = x(k, c) - h;
    const auto dn = row_gradient(adj, y, cfg, k);
    y(k, c) = x(k, c);
    for (std::size_t r = 0; r < d; ++r) j[r][c] = (up[r] - dn[r]) / (2.0 * h);
  }
  return j;
}

cne::Embedding solve_row(const Matrix& adj, cne::Embedding x, const cne::EmbeddingConfig& cfg,
                         std::size_t k, int iters) {
  for (int it = 0; it < iters; ++it) {
    const auto g = row_gradient(adj, x, cfg, k);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    if (std::sqrt(norm) < 1e-13) break;
    const auto step = solve_dense(numeric_row_jacobian(adj, x, cfg, k), g);
    for (std::size_t c = 0; c < x.dim(); ++c) x(k, c) -= step[c];
  }
  return x;
}

double frozen_row_derivative(const Matrix& adj, const cne::Embedding& x,
                             const cne::EmbeddingConfig& cfg, std::size_t k, std::size_t l,
                             std::size_t i, double delta) {
  cne::EmbeddingConfig fixed = cfg;
  fixed.prior_pi = prior_of(adj, cfg);
  auto at = [&](double shift) {
    Matrix a = adj;
    a[k][i] += shift;
    a[i][k] += shift;
    const auto y = solve_row(a, x, fixed, k);
    return bayes_ratio(distance(y, k, l), fixed.sigma1, fixed.sigma2, *fixed.prior_pi);
  };
  return (at(delta) - at(-delta)) / (2.0 * delta);
}

double bernoulli_kl_pair(double p, double q) {
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

double bernoulli_kl(const Matrix& p, const Matrix& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t l = k + 1; l < p.size(); ++l) s += bernoulli_kl_pair(p[k][l], q[k][l]);
  return s;
}

bool disconnects_after_removal(const cne::Graph& g, cne::NodeId u, cne::NodeId v) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<cne::NodeId>> adj(n);
  for (const auto& e : g.edges()) {
    if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) continue;
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<cne::NodeId> stack{u};
  seen[u] = 1;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (auto b : adj[a])
      if (!seen[b]) {
        seen[b] = 1;
        stack.push_back(b);
      }
  }
  return !seen[v];
}

cne::Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  for (;;) {
    std::vector<cne::Edge> edges;
    for (cne::NodeId a = 0; a < n; ++a)
      for (cne::NodeId b = a + 1; b < n; ++b)
        if (coin(rng)) edges.push_back({a, b});
    if (!edges.empty() && edges.size() < n * (n - 1) / 2) return cne::Graph::from_edges(n, edges);
  }
}

cne::Graph planted_partition(std::size_t n, std::size_t blocks, double p_in, double p_out,
                             std::mt19937_64& rng, std::vector<int>* communities) {
  std::bernoulli_distribution in(p_in), out(p_out);
  std::vector<int> comm(n);
  for (std::size_t k = 0; k < n; ++k) comm[k] = static_cast<int>(k * blocks / n);
  std::vector<cne::Edge> edges;
  for (cne::NodeId a = 0; a < n; ++a)
    for (cne::NodeId b = a + 1; b < n; ++b)
      if (comm[a] == comm[b] ? in(rng) : out(rng)) edges.push_back({a, b});
  if (communities) *communities = comm;
  return cne::Graph::from_edges(n, edges);
}

cne::Embedding random_coords(std::size_t n, std::size_t d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  cne::Embedding x(n, d);
  for (auto& v : x.values()) v = normal(rng);
  return x;
}

cne::Graph karate() {
  return cne::load_edge_list_file(std::string(CNE_TEST_DATA_DIR) + "/karate.edgelist").graph;
}

std::vector<int> karate_factions() {
  return cne::load_communities_file(std::string(CNE_TEST_DATA_DIR) + "/karate.communities",
                                    karate());
}

}  // namespace oracle
