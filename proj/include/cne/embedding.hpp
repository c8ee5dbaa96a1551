#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/graph.hpp"
#include "cne/kernels.hpp"

namespace cne {

/// Model and optimizer settings. Defaults follow the reference setup:
/// sigma2 = 2, learning rate 0.2, 2000 iterations, ftol 1e-7.
struct EmbeddingConfig {
  std::size_t dim = 2;
  double sigma1 = 1.0;
  double sigma2 = 2.0;
  /// Prior link probability; unset means "graph density", resolved by embed().
  std::optional<double> prior_pi;
  double learning_rate = 0.2;
  std::size_t max_iter = 2000;
  double ftol = 1e-7;
  std::uint64_t seed = 0;

  double gamma() const { return 1.0 / (sigma1 * sigma1) - 1.0 / (sigma2 * sigma2); }

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Copy of cfg with prior_pi filled from g's density when unset.
EmbeddingConfig resolve_prior(const EmbeddingConfig& cfg, const Graph& g);

/// Logistic parameters of the half-normal Bayes ratio. cfg.prior_pi must be set.
kernels::PairModel pair_model(const EmbeddingConfig& cfg);

/// Dense row-major n x d matrix; row i is the coordinate of node i.
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}

  std::size_t num_nodes() const { return n_; }
  std::size_t dim() const { return d_; }

  double& operator()(std::size_t i, std::size_t c) { return data_[i * d_ + c]; }
  double operator()(std::size_t i, std::size_t c) const { return data_[i * d_ + c]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * d_, d_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  /// Coordinates transposed to d x n (coordinate-major) for the kernels.
  std::vector<double> transposed() const;

  bool all_finite() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Symmetric n x n matrix of P(a_kl = 1 | X). The diagonal is unused (0).
class LinkProbabilityMatrix {
 public:
  LinkProbabilityMatrix() = default;
  explicit LinkProbabilityMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t k, std::size_t l) const { return data_[k * n_ + l]; }
  double& operator()(std::size_t k, std::size_t l) { return data_[k * n_ + l]; }
  std::span<const double> row(std::size_t k) const { return {data_.data() + k * n_, n_}; }
  const std::vector<double>& values() const { return data_; }

  /// Sets (k,l) and (l,k).
  void set(std::size_t k, std::size_t l, double p) {
    data_[k * n_ + l] = p;
    data_[l * n_ + k] = p;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EmbedDiagnostics {
  std::size_t iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  std::size_t step_halvings = 0;
  std::vector<double> objective_trace;
  std::string kernel;
};

struct EmbedResult {
  Embedding coords;
  LinkProbabilityMatrix probs;
  EmbedDiagnostics diagnostics;
  /// The configuration actually used (prior resolved).
  EmbeddingConfig config;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, EmbedDiagnostics diag)
      : std::runtime_error(what), diagnostics_(std::move(diag)) {}
  const EmbedDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  EmbedDiagnostics diagnostics_;
};

double link_probability(std::span<const double> xk, std::span<const double> xl,
                        const EmbeddingConfig& cfg);

double log_likelihood(const Graph& g, const Embedding& x, const EmbeddingConfig& cfg);

/// Row i = gamma * sum_{j != i} (a_ij - P_ij) (x_j - x_i).
Embedding log_likelihood_gradient(const Graph& g, const Embedding& x,
                                  const EmbeddingConfig& cfg);

/// Objective and gradient in one pass over the pairs.
double log_likelihood_and_gradient(const Graph& g, const Embedding& x,
                                   const EmbeddingConfig& cfg, Embedding& grad);

LinkProbabilityMatrix link_probability_matrix(const Embedding& x, const EmbeddingConfig& cfg);

/// Seeded N(0, 1) coordinates.
Embedding random_embedding(std::size_t n, std::size_t d, std::uint64_t seed);

/// Maximum-likelihood fit by full-batch gradient ascent with step halving.
/// Starts from init when given; max_iter = 0 returns the start unchanged.
EmbedResult embed(const Graph& g, const EmbeddingConfig& cfg,
                  const std::optional<Embedding>& init = std::nullopt);

}  // namespace cne
