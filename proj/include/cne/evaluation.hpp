#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/embedding.hpp"
#include "cne/graph.hpp"
#include "cne/sensitivity.hpp"

namespace cne {

/// The two rankings do not cover the same flips.
class FlipSetMismatch : public std::invalid_argument {
 public:
  FlipSetMismatch(const std::string& what, std::vector<EdgeFlip> only_gt,
                  std::vector<EdgeFlip> only_cand)
      : std::invalid_argument(what), only_gt_(std::move(only_gt)),
        only_cand_(std::move(only_cand)) {}
  const std::vector<EdgeFlip>& only_in_ground_truth() const { return only_gt_; }
  const std::vector<EdgeFlip>& only_in_candidate() const { return only_cand_; }

 private:
  std::vector<EdgeFlip> only_gt_, only_cand_;
};

/// Relevance of each flip is its ground-truth score; the candidate supplies
/// the order. Full list, log2(rank + 1) discounts. An all-zero ground truth
/// gives 1.
double ndcg(const SensitivityRanking& gt, const SensitivityRanking& cand);

/// Ground-truth scores listed in the candidate's order.
std::vector<double> relevance_in_candidate_order(const SensitivityRanking& gt,
                                                 const SensitivityRanking& cand);

/// NDCG of the given relevance sequence against its own sorted order.
double ndcg_of_sequence(const std::vector<double>& relevance);

/// Fraction-with-smoothing p-value: (1 + #{uniform random orderings whose
/// NDCG >= observed}) / (n_samples + 1). The random orderings do not depend
/// on the candidate, only on the flip count and seed.
double randomization_test(const SensitivityRanking& gt, const SensitivityRanking& cand,
                          std::size_t n_samples, std::uint64_t seed);

struct RankingComparison {
  SensitivityRanking ground_truth;
  SensitivityRanking candidate;
  double ndcg = 0.0;
  double p_value = 1.0;
  std::size_t n_samples = 0;
};

RankingComparison compare_rankings(const SensitivityRanking& gt, const SensitivityRanking& cand,
                                   std::size_t n_samples = 1000, std::uint64_t seed = 0);

/// Spearman correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Spearman over the flips shared by two rankings (by flip identity).
double spearman(const SensitivityRanking& a, const SensitivityRanking& b);

struct TimingRecord {
  Method method = Method::RE;
  std::string dataset;
  double seconds_per_flip = 0.0;
  std::size_t flips_measured = 0;
  /// One-time Hessian work shared by every flip (Approx variants only).
  double precompute_seconds = 0.0;
};

struct BenchmarkReport {
  std::vector<TimingRecord> records;
  std::string kernel;
  std::string compiler;
  unsigned hardware_threads = 0;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t dim = 0;
};

/// Single-threaded. RE and IPRE run on a random sample of sample_flips flips;
/// Approx and ApproxExact sweep every flip. The clean embedding is not timed.
BenchmarkReport benchmark_runtime(const Graph& g, const EmbeddingConfig& cfg,
                                  const std::vector<Method>& methods, std::size_t sample_flips,
                                  std::uint64_t seed, const std::string& dataset = "");

/// As above on an existing clean embedding.
BenchmarkReport benchmark_runtime(const Graph& g, const EmbedResult& base,
                                  const std::vector<Method>& methods, std::size_t sample_flips,
                                  std::uint64_t seed, const std::string& dataset = "");

}  // namespace cne
