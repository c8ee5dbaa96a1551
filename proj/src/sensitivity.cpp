#include "cne/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ascent.hpp"
#include "pair_eval.hpp"

namespace cne {

const char* to_string(Method m) {
  switch (m) {
    case Method::RE: return "re";
    case Method::IPRE: return "ipre";
    case Method::Approx: return "approx";
    case Method::ApproxExact: return "approx-exact";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "re") return Method::RE;
  if (name == "ipre") return Method::IPRE;
  if (name == "approx") return Method::Approx;
  if (name == "approx-exact") return Method::ApproxExact;
  return std::nullopt;
}

double bernoulli_kl(const LinkProbabilityMatrix& p, const LinkProbabilityMatrix& q) {
  if (p.size() != q.size()) throw std::invalid_argument("bernoulli_kl: dimension mismatch");
  const auto n = p.size();
  const auto& k = kernels::active();
  double sum = 0.0;
  for (std::size_t r = 0; r + 1 < n; ++r)
    sum += k.bernoulli_kl(p.row(r).data() + r + 1, q.row(r).data() + r + 1, n - r - 1);
  return sum;
}

namespace {

/// Values of row r at every column except those in skip (sorted, at most 2).
void gather_row(std::span<const double> row, std::size_t r, std::size_t other,
                std::vector<double>& out) {
  for (std::size_t c = 0; c < row.size(); ++c)
    if (c != r && c != other) out.push_back(row[c]);
}

}  // namespace

double bernoulli_kl_touching(const LinkProbabilityMatrix& p, const LinkProbabilityMatrix& q,
                             NodeId i, NodeId j) {
  if (p.size() != q.size()) throw std::invalid_argument("bernoulli_kl: dimension mismatch");
  std::vector<double> pv, qv;
  pv.reserve(2 * p.size());
  qv.reserve(2 * p.size());
  gather_row(p.row(i), i, i, pv);
  gather_row(q.row(i), i, i, qv);
  gather_row(p.row(j), j, i, pv);
  gather_row(q.row(j), j, i, qv);
  return kernels::active().bernoulli_kl(pv.data(), qv.data(), pv.size());
}

namespace {

bool disconnects(const Graph& g, const EdgeFlip& f) {
  return f.direction == FlipDirection::Deletion && is_bridge(g, f);
}

void check_flip(const Graph& g, const EdgeFlip& f) {
  if (f.i == f.j || f.i >= g.num_nodes() || f.j >= g.num_nodes())
    throw InvalidFlip("flip does not reference two distinct nodes of the graph");
}

}  // namespace

ReembedOutcome sensitivity_re_detailed(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                       bool flag_bridges) {
  check_flip(g, f);
  const Graph corrupted = flip_edge(g, f);
  ReembedOutcome out;
  out.corrupted = embed(corrupted, base.config, base.coords);
  out.score.flip = f;
  out.score.method = Method::RE;
  out.score.score = bernoulli_kl(base.probs, out.corrupted.probs);
  out.score.disconnects = flag_bridges && disconnects(g, f);
  return out;
}

SensitivityScore sensitivity_re(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                bool flag_bridges) {
  return sensitivity_re_detailed(g, base, f, flag_bridges).score;
}

PartialReembedOutcome sensitivity_ipre_detailed(const Graph& g, const EmbedResult& base,
                                                const EdgeFlip& f, bool flag_bridges) {
  check_flip(g, f);
  const Graph corrupted = flip_edge(g, f);
  const auto n = g.num_nodes();
  const auto d = base.coords.dim();
  const auto model = pair_model(base.config);
  const auto& k = kernels::active();
  const NodeId i = f.i, j = f.j;
  const NodeId lo = std::min(i, j), hi = std::max(i, j);

  std::vector<double> xt = base.coords.transposed();
  std::vector<double> params(2 * d);
  std::copy_n(base.coords.row(i).data(), d, params.begin());
  std::copy_n(base.coords.row(j).data(), d, params.begin() + d);

  const auto* adj_i = corrupted.adjacency_row(i).data();
  const auto* adj_j = corrupted.adjacency_row(j).data();

  // Objective: all terms touching i or j; the (i, j) term is counted in row i.
  auto eval = [&](const std::vector<double>& x, std::vector<double>& grad) {
    const double* xi = x.data();
    const double* xj = x.data() + d;
    for (std::size_t c = 0; c < d; ++c) {
      xt[c * n + i] = xi[c];
      xt[c * n + j] = xj[c];
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double* gi = grad.data();
    double* gj = grad.data() + d;
    double ll = 0.0, ignored = 0.0;
    k.pair_row(model, d, xi, xt.data(), n, adj_i, 0, i, gi, nullptr, &ll);
    k.pair_row(model, d, xi, xt.data(), n, adj_i, i + 1, n, gi, nullptr, &ll);
    k.pair_row(model, d, xj, xt.data(), n, adj_j, 0, lo, gj, nullptr, &ll);
    k.pair_row(model, d, xj, xt.data(), n, adj_j, lo + 1, hi, gj, nullptr, &ll);
    k.pair_row(model, d, xj, xt.data(), n, adj_j, hi + 1, n, gj, nullptr, &ll);
    k.pair_row(model, d, xj, xt.data(), n, adj_j, i, i + 1, gj, nullptr, &ignored);
    return ll;
  };

  const auto& cfg = base.config;
  PartialReembedOutcome out;
  out.diagnostics =
      detail::gradient_ascent(params, eval, {cfg.learning_rate, cfg.max_iter, cfg.ftol});
  out.diagnostics.kernel = std::string(k.name);

  out.corrupted = base.coords;
  std::copy_n(params.begin(), d, out.corrupted.row(i).begin());
  std::copy_n(params.begin() + d, d, out.corrupted.row(j).begin());
  if (!out.corrupted.all_finite())
    throw ConvergenceError("partial re-embedding became non-finite", out.diagnostics);

  // Changed probabilities: row i (all l != i) and row j (l not in {i, j}).
  for (std::size_t c = 0; c < d; ++c) {
    xt[c * n + i] = out.corrupted(i, c);
    xt[c * n + j] = out.corrupted(j, c);
  }
  std::vector<double> qi(n, 0.0), qj(n, 0.0), scratch(d, 0.0);
  double ll = 0.0;
  k.pair_row(model, d, out.corrupted.row(i).data(), xt.data(), n, adj_i, 0, i, scratch.data(),
             qi.data(), &ll);
  k.pair_row(model, d, out.corrupted.row(i).data(), xt.data(), n, adj_i, i + 1, n, scratch.data(),
             qi.data(), &ll);
  k.pair_row(model, d, out.corrupted.row(j).data(), xt.data(), n, adj_j, 0, j, scratch.data(),
             qj.data(), &ll);
  k.pair_row(model, d, out.corrupted.row(j).data(), xt.data(), n, adj_j, j + 1, n, scratch.data(),
             qj.data(), &ll);

  std::vector<double> pv, qv;
  pv.reserve(2 * n);
  qv.reserve(2 * n);
  gather_row(base.probs.row(i), i, i, pv);
  gather_row(qi, i, i, qv);
  gather_row(base.probs.row(j), j, i, pv);
  gather_row(qj, j, i, qv);

  out.score.flip = f;
  out.score.method = Method::IPRE;
  out.score.score = k.bernoulli_kl(pv.data(), qv.data(), pv.size());
  out.score.disconnects = flag_bridges && disconnects(g, f);
  return out;
}

SensitivityScore sensitivity_ipre(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                  bool flag_bridges) {
  return sensitivity_ipre_detailed(g, base, f, flag_bridges).score;
}

SensitivityScore sensitivity_approx(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                    const HessianBlockStore& blocks, bool flag_bridges) {
  check_flip(g, f);
  const auto& x = base.coords;
  const auto n = x.num_nodes();
  const auto d = x.dim();
  const double gamma = base.config.gamma();
  const NodeId i = f.i, j = f.j;
  const NodeId lo = std::min(i, j), hi = std::max(i, j);
  const auto& k = kernels::active();
  const auto& xt = blocks.coords_transposed();

  Eigen::Map<const Eigen::VectorXd> xi(x.row(i).data(), static_cast<Eigen::Index>(d));
  Eigen::Map<const Eigen::VectorXd> xj(x.row(j).data(), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd dij = xi - xj;
  // Response directions of x_i and x_j (up to gamma) to raising a_ij.
  const Eigen::VectorXd wi = blocks.solve(i, dij);
  const Eigen::VectorXd wj = blocks.solve(j, -dij);

  double sum = 0.0;
  for (const auto& [node, w] : {std::pair{i, &wi}, std::pair{j, &wj}}) {
    const double* prow = base.probs.row(node).data();
    const double* xn = x.row(node).data();
    sum += k.quad_form_row(d, xn, w->data(), xt.data(), n, prow, 0, lo);
    sum += k.quad_form_row(d, xn, w->data(), xt.data(), n, prow, lo + 1, hi);
    sum += k.quad_form_row(d, xn, w->data(), xt.data(), n, prow, hi + 1, n);
  }
  const double pij = base.probs(i, j);
  const double proj = dij.dot(wi) - dij.dot(wj);
  sum += pij * (1.0 - pij) * proj * proj;

  SensitivityScore s;
  s.flip = f;
  s.method = Method::Approx;
  s.score = 0.5 * std::pow(gamma, 4) * sum;
  s.regularized = blocks.regularized(i) || blocks.regularized(j);
  s.disconnects = flag_bridges && disconnects(g, f);
  return s;
}

std::vector<EdgeFlip> enumerate_flips(const Graph& g) {
  std::vector<EdgeFlip> flips;
  const auto n = g.num_nodes();
  flips.reserve(g.num_pairs());
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      flips.push_back({i, j, g.has_edge(i, j) ? FlipDirection::Deletion : FlipDirection::Addition});
  return flips;
}

SensitivityRanking make_ranking(Method method, std::vector<SensitivityScore> scores,
                                std::uint64_t hash) {
  std::sort(scores.begin(), scores.end(), [](const SensitivityScore& a, const SensitivityScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.flip.i != b.flip.i) return a.flip.i < b.flip.i;
    return a.flip.j < b.flip.j;
  });
  SensitivityRanking r;
  r.method = method;
  r.embedding_hash = hash;
  r.items.reserve(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k)
    r.items.push_back({scores[k].flip, scores[k].score, k + 1, scores[k].disconnects,
                       scores[k].regularized});
  return r;
}

std::vector<SensitivityScore> score_flips(const Graph& g, const EmbedResult& base, Method method,
                                          const std::vector<EdgeFlip>& flips, std::size_t threads) {
  std::optional<HessianBlockStore> blocks;
  std::optional<FullHessian> full;
  if (method == Method::Approx) blocks.emplace(g, base);
  if (method == Method::ApproxExact) full.emplace(g, base);

  const auto bridges = find_bridges(g);
  auto score_one = [&](const EdgeFlip& f) {
    SensitivityScore s;
    switch (method) {
      case Method::RE: s = sensitivity_re(g, base, f, false); break;
      case Method::IPRE: s = sensitivity_ipre(g, base, f, false); break;
      case Method::Approx: s = sensitivity_approx(g, base, f, *blocks, false); break;
      case Method::ApproxExact: s = sensitivity_approx_exact(g, base, f, *full, false); break;
    }
    s.disconnects = f.direction == FlipDirection::Deletion &&
                    std::binary_search(bridges.begin(), bridges.end(), Edge{f.i, f.j});
    return s;
  };

  std::vector<SensitivityScore> out(flips.size());
  threads = std::max<std::size_t>(1, std::min(threads, flips.size()));
  if (threads == 1) {
    for (std::size_t k = 0; k < flips.size(); ++k) out[k] = score_one(flips[k]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next.fetch_add(1); k < flips.size(); k = next.fetch_add(1)) {
        try {
          out[k] = score_one(flips[k]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(flips.size());
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<EdgeFlip> select_flips(const Graph& g, const RankOptions& options) {
  const auto bridges = options.exclude_bridges ? find_bridges(g) : std::vector<Edge>{};
  std::vector<EdgeFlip> flips;
  for (const auto& f : enumerate_flips(g)) {
    if (options.only == FlipFilter::DeletionsOnly && f.direction != FlipDirection::Deletion) continue;
    if (options.only == FlipFilter::AdditionsOnly && f.direction != FlipDirection::Addition) continue;
    if (options.exclude_bridges && f.direction == FlipDirection::Deletion &&
        std::binary_search(bridges.begin(), bridges.end(), Edge{f.i, f.j}))
      continue;
    flips.push_back(f);
  }
  return flips;
}

SensitivityRanking rank_flips(const Graph& g, const EmbedResult& base, Method method,
                              const RankOptions& options) {
  const auto flips = select_flips(g, options);
  return make_ranking(method, score_flips(g, base, method, flips, options.threads),
                      embedding_hash(base.coords));
}

SensitivityRanking rank_all(const Graph& g, const EmbeddingConfig& cfg, Method method,
                            const RankOptions& options) {
  const auto base = embed(g, cfg);
  return rank_flips(g, base, method, options);
}

std::uint64_t embedding_hash(const Embedding& x) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t dims[2] = {x.num_nodes(), x.dim()};
  mix(dims, sizeof(dims));
  mix(x.values().data(), x.values().size() * sizeof(double));
  return h;
}

}  // namespace cne
