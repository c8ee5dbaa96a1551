#include "cne/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ascent.hpp"
#include "pair_eval.hpp"

namespace cne {

void EmbeddingConfig::validate() const {
  if (dim < 1 || dim > kernels::kMaxDim)
    throw std::invalid_argument("embedding dimension must be in [1, 32]");
  if (!(sigma1 > 0.0) || !(sigma2 > sigma1))
    throw std::invalid_argument("need 0 < sigma1 < sigma2");
  if (prior_pi && !(*prior_pi > 0.0 && *prior_pi < 1.0))
    throw std::invalid_argument("prior_pi must lie in (0, 1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(ftol >= 0.0)) throw std::invalid_argument("ftol must be non-negative");
}

EmbeddingConfig resolve_prior(const EmbeddingConfig& cfg, const Graph& g) {
  EmbeddingConfig out = cfg;
  if (!out.prior_pi) {
    const double density = g.density();
    if (!(density > 0.0 && density < 1.0))
      throw std::invalid_argument("graph density must lie in (0, 1) to serve as prior");
    out.prior_pi = density;
  }
  return out;
}

kernels::PairModel pair_model(const EmbeddingConfig& cfg) {
  if (!cfg.prior_pi) throw std::logic_error("pair_model needs a resolved prior");
  const double pi = *cfg.prior_pi;
  return {cfg.gamma(), std::log(pi / (1.0 - pi)) + std::log(cfg.sigma2 / cfg.sigma1)};
}

std::vector<double> Embedding::transposed() const {
  std::vector<double> t(n_ * d_);
  detail::transpose_into(data_.data(), n_, d_, t.data());
  return t;
}

bool Embedding::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double link_probability(std::span<const double> xk, std::span<const double> xl,
                        const EmbeddingConfig& cfg) {
  double d2 = 0.0;
  for (std::size_t c = 0; c < xk.size(); ++c) {
    const double diff = xk[c] - xl[c];
    d2 += diff * diff;
  }
  const auto model = pair_model(cfg);
  const double t = 0.5 * model.gamma * d2 - model.offset;
  return std::clamp(1.0 / (1.0 + std::exp(std::clamp(t, -708.0, 708.0))), kernels::kProbEps,
                    1.0 - kernels::kProbEps);
}

namespace detail {

void transpose_into(const double* x, std::size_t n, std::size_t d, double* xt) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) xt[c * n + i] = x[i * d + c];
}

double full_objective(const Graph& g, const kernels::PairModel& model, std::size_t d,
                      const double* x, double* grad, std::vector<double>& xt) {
  const auto n = g.num_nodes();
  const auto& k = kernels::active();
  xt.resize(n * d);
  transpose_into(x, n, d, xt.data());
  std::fill(grad, grad + n * d, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_ll = 0.0;
    const auto* adj = g.adjacency_row(static_cast<NodeId>(i)).data();
    k.pair_row(model, d, x + i * d, xt.data(), n, adj, 0, i, grad + i * d, nullptr, &row_ll);
    k.pair_row(model, d, x + i * d, xt.data(), n, adj, i + 1, n, grad + i * d, nullptr, &row_ll);
    total += row_ll;
  }
  // Every unordered pair was visited from both ends.
  return 0.5 * total;
}

}  // namespace detail

double log_likelihood_and_gradient(const Graph& g, const Embedding& x, const EmbeddingConfig& cfg,
                                   Embedding& grad) {
  if (x.num_nodes() != g.num_nodes()) throw std::invalid_argument("embedding/graph size mismatch");
  const auto rcfg = resolve_prior(cfg, g);
  grad = Embedding(x.num_nodes(), x.dim());
  std::vector<double> xt;
  return detail::full_objective(g, pair_model(rcfg), x.dim(), x.values().data(),
                                grad.values().data(), xt);
}

double log_likelihood(const Graph& g, const Embedding& x, const EmbeddingConfig& cfg) {
  Embedding grad;
  return log_likelihood_and_gradient(g, x, cfg, grad);
}

Embedding log_likelihood_gradient(const Graph& g, const Embedding& x, const EmbeddingConfig& cfg) {
  Embedding grad;
  log_likelihood_and_gradient(g, x, cfg, grad);
  return grad;
}

LinkProbabilityMatrix link_probability_matrix(const Embedding& x, const EmbeddingConfig& cfg) {
  const auto n = x.num_nodes();
  const auto d = x.dim();
  const auto model = pair_model(cfg);
  const auto& k = kernels::active();
  const auto xt = x.transposed();
  LinkProbabilityMatrix probs(n);
  std::vector<std::uint8_t> no_edges(n, 0);
  std::vector<double> row(n, 0.0), scratch(d, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double ll = 0.0;
    k.pair_row(model, d, x.row(i).data(), xt.data(), n, no_edges.data(), i + 1, n, scratch.data(),
               row.data(), &ll);
    for (std::size_t j = i + 1; j < n; ++j) probs.set(i, j, row[j]);
  }
  return probs;
}

Embedding random_embedding(std::size_t n, std::size_t d, std::uint64_t seed) {
  Embedding x(n, d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : x.values()) v = normal(rng);
  return x;
}

EmbedResult embed(const Graph& g, const EmbeddingConfig& cfg, const std::optional<Embedding>& init) {
  cfg.validate();
  if (g.num_nodes() < 2) throw std::invalid_argument("embedding needs at least two nodes");
  EmbedResult result;
  result.config = resolve_prior(cfg, g);
  const auto model = pair_model(result.config);
  const auto n = g.num_nodes();
  const auto d = cfg.dim;

  Embedding x = init ? *init : random_embedding(n, d, cfg.seed);
  if (x.num_nodes() != n || x.dim() != d)
    throw std::invalid_argument("initial embedding has the wrong shape");

  std::vector<double> xt;
  auto eval = [&](const std::vector<double>& params, std::vector<double>& grad) {
    return detail::full_objective(g, model, d, params.data(), grad.data(), xt);
  };
  result.diagnostics = detail::gradient_ascent(
      x.values(), eval, {cfg.learning_rate, cfg.max_iter, cfg.ftol});
  result.diagnostics.kernel = std::string(kernels::active().name);
  if (!x.all_finite()) throw ConvergenceError("embedding became non-finite", result.diagnostics);

  result.probs = link_probability_matrix(x, result.config);
  result.coords = std::move(x);
  return result;
}

}  // namespace cne
