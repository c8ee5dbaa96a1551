#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cne/embedding.hpp"
#include "cne/graph.hpp"

namespace cne {

/// RE: full re-embedding. IPRE: re-embed only the flipped pair's endpoints.
/// Approx: closed-form second-order KL with diagonal Hessian blocks.
/// ApproxExact: the same closed form with the full Hessian (validation only).
enum class Method : std::uint8_t { RE, IPRE, Approx, ApproxExact };

const char* to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

struct SensitivityScore {
  EdgeFlip flip;
  double score = 0.0;  // nats
  Method method = Method::RE;
  bool disconnects = false;
  /// A Hessian solve needed the ridge fallback.
  bool regularized = false;
};

/// KL[P || Q] summed over unordered pairs, as independent Bernoullis.
double bernoulli_kl(const LinkProbabilityMatrix& p, const LinkProbabilityMatrix& q);

/// The same sum restricted to pairs that touch node i or node j.
double bernoulli_kl_touching(const LinkProbabilityMatrix& p, const LinkProbabilityMatrix& q,
                             NodeId i, NodeId j);

struct ReembedOutcome {
  SensitivityScore score;
  EmbedResult corrupted;
};

/// Re-embeds flip_edge(g, f) warm-started from base and compares all pairs.
/// base must come from embed(g, ...); its resolved config is reused.
/// flag_bridges = false skips the per-flip bridge search (callers that hold
/// a bridge table set SensitivityScore::disconnects themselves).
ReembedOutcome sensitivity_re_detailed(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                       bool flag_bridges = true);
SensitivityScore sensitivity_re(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                bool flag_bridges = true);

struct PartialReembedOutcome {
  SensitivityScore score;
  Embedding corrupted;
  EmbedDiagnostics diagnostics;
};

/// Optimizes rows f.i and f.j only, every other row frozen at base, and sums
/// the KL over the pairs those rows touch.
PartialReembedOutcome sensitivity_ipre_detailed(const Graph& g, const EmbedResult& base,
                                                const EdgeFlip& f, bool flag_bridges = true);
SensitivityScore sensitivity_ipre(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                  bool flag_bridges = true);

/// H_k = gamma * sum_{l != k} [(P_kl - a_kl) I - gamma P_kl (1 - P_kl) dx dx^T],
/// dx = x_k - x_l: the Hessian of the log-likelihood in x_k alone.
struct HessianBlock {
  NodeId node = 0;
  Eigen::MatrixXd block;
};

HessianBlock hessian_block(NodeId k, const Embedding& x, const LinkProbabilityMatrix& p,
                           const Graph& g, const EmbeddingConfig& cfg);

/// Factored H_k for every node plus the transposed base coordinates, shared
/// read-only by all Approx evaluations on one base model.
class HessianBlockStore {
 public:
  HessianBlockStore(const Graph& g, const EmbedResult& base);

  std::size_t size() const { return blocks_.size(); }
  const HessianBlock& block(NodeId k) const { return blocks_[k]; }
  bool regularized(NodeId k) const { return regularized_[k] != 0; }
  std::size_t regularized_count() const;

  /// H_k^{-1} rhs through the stored factorization.
  Eigen::VectorXd solve(NodeId k, const Eigen::VectorXd& rhs) const;

  const std::vector<double>& coords_transposed() const { return coords_t_; }

 private:
  std::vector<HessianBlock> blocks_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> factors_;
  std::vector<char> regularized_;
  std::vector<double> coords_t_;
};

/// dP_kl / da_ki with only x_k responding:
/// -gamma^2 P_kl (1 - P_kl) (x_k - x_l)^T H_k^{-1} (x_k - x_i).
double grad_link_prob_block(NodeId k, NodeId l, NodeId i, const Embedding& x,
                            const LinkProbabilityMatrix& p, const HessianBlockStore& blocks,
                            const EmbeddingConfig& cfg);

/// 1/2 sum over affected pairs of (dP/da_ij)^2 / (P (1 - P)); the flipped
/// pair itself takes the response of both endpoints, once.
SensitivityScore sensitivity_approx(const Graph& g, const EmbedResult& base, const EdgeFlip& f,
                                    const HessianBlockStore& blocks, bool flag_bridges = true);

inline constexpr std::size_t kMaxFullHessianSize = 600;

/// Full nd x nd Hessian of the log-likelihood with the rigid-motion gauge
/// (translations and rotations) projected out; solves use the pseudo-inverse
/// on the remaining subspace.
class FullHessian {
 public:
  FullHessian(const Graph& g, const EmbedResult& base);

  const Eigen::MatrixXd& matrix() const { return h_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// More near-zero eigenvalues than gauge directions were dropped.
  bool regularized() const { return regularized_; }

 private:
  Eigen::MatrixXd h_;
  Eigen::MatrixXd gauge_;  // orthonormal columns
  Eigen::MatrixXd eigvecs_;
  Eigen::VectorXd inv_eigvals_;
  bool regularized_ = false;
};

/// dP_kl / da_ij through the full Hessian.
double grad_link_prob_exact(NodeId k, NodeId l, NodeId i, NodeId j, const Embedding& x,
                            const LinkProbabilityMatrix& p, const FullHessian& h,
                            const EmbeddingConfig& cfg);
double grad_link_prob_exact(NodeId k, NodeId l, NodeId i, NodeId j, const Embedding& x,
                            const LinkProbabilityMatrix& p, const Graph& g,
                            const EmbeddingConfig& cfg);

/// Second-order KL over all pairs using the full-Hessian gradients.
SensitivityScore sensitivity_approx_exact(const Graph& g, const EmbedResult& base,
                                          const EdgeFlip& f, const FullHessian& h,
                                          bool flag_bridges = true);

/// All n(n-1)/2 unordered pairs in (i, j) lexicographic order.
std::vector<EdgeFlip> enumerate_flips(const Graph& g);

enum class FlipFilter : std::uint8_t { All, DeletionsOnly, AdditionsOnly };

struct RankOptions {
  bool exclude_bridges = false;
  FlipFilter only = FlipFilter::All;
  std::size_t threads = 1;
};

struct RankedFlip {
  EdgeFlip flip;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  bool disconnects = false;
  bool regularized = false;
};

struct SensitivityRanking {
  Method method = Method::RE;
  std::vector<RankedFlip> items;  // sorted, rank 1 first
  std::uint64_t embedding_hash = 0;
};

/// Sorts by score descending, ties by (i, j) ascending, and assigns ranks.
SensitivityRanking make_ranking(Method method, std::vector<SensitivityScore> scores,
                                std::uint64_t embedding_hash = 0);

/// Scores the given flips against one base model on a worker pool. Output
/// order follows the input order.
std::vector<SensitivityScore> score_flips(const Graph& g, const EmbedResult& base, Method method,
                                          const std::vector<EdgeFlip>& flips,
                                          std::size_t threads = 1);

/// Flips selected by options, marked with their bridge status.
std::vector<EdgeFlip> select_flips(const Graph& g, const RankOptions& options);

SensitivityRanking rank_flips(const Graph& g, const EmbedResult& base, Method method,
                              const RankOptions& options = {});

/// Embeds g once, then ranks every selected flip.
SensitivityRanking rank_all(const Graph& g, const EmbeddingConfig& cfg, Method method,
                            const RankOptions& options = {});

/// FNV-1a over the coordinate bytes; ties rankings to one fitted model.
std::uint64_t embedding_hash(const Embedding& x);

}  // namespace cne
