#include "cne/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace cne {

namespace {

struct Keyed {
  Edge key;
  double score;
  auto operator<=>(const Keyed& o) const { return key <=> o.key; }
  bool operator==(const Keyed& o) const { return key == o.key; }
};

std::vector<Keyed> keyed(const SensitivityRanking& r) {
  std::vector<Keyed> out;
  out.reserve(r.items.size());
  for (const auto& it : r.items) out.push_back({Edge{it.flip.i, it.flip.j}, it.score});
  std::sort(out.begin(), out.end());
  return out;
}

EdgeFlip as_flip(const Edge& e, const SensitivityRanking& r) {
  for (const auto& it : r.items)
    if (it.flip.i == e.u && it.flip.j == e.v) return it.flip;
  return {e.u, e.v, FlipDirection::Addition};
}

void check_same_flips(const SensitivityRanking& gt, const SensitivityRanking& cand,
                      const std::vector<Keyed>& kg, const std::vector<Keyed>& kc) {
  bool dup = std::adjacent_find(kg.begin(), kg.end()) != kg.end() ||
             std::adjacent_find(kc.begin(), kc.end()) != kc.end();
  if (!dup && kg.size() == kc.size() &&
      std::equal(kg.begin(), kg.end(), kc.begin(),
                 [](const Keyed& a, const Keyed& b) { return a.key == b.key; }))
    return;
  std::vector<EdgeFlip> only_gt, only_cand;
  std::size_t a = 0, b = 0;
  while (a < kg.size() || b < kc.size()) {
    if (b == kc.size() || (a < kg.size() && kg[a].key < kc[b].key)) {
      only_gt.push_back(as_flip(kg[a++].key, gt));
    } else if (a == kg.size() || kc[b].key < kg[a].key) {
      only_cand.push_back(as_flip(kc[b++].key, cand));
    } else {
      ++a;
      ++b;
    }
  }
  std::string what = "rankings cover different flip sets: " + std::to_string(only_gt.size()) +
                     " only in ground truth, " + std::to_string(only_cand.size()) +
                     " only in candidate";
  if (dup) what += " (duplicate flips present)";
  throw FlipSetMismatch(what, std::move(only_gt), std::move(only_cand));
}

double dcg(const std::vector<double>& rel) {
  double s = 0.0;
  for (std::size_t r = 0; r < rel.size(); ++r) s += rel[r] / std::log2(static_cast<double>(r) + 2.0);
  return s;
}

double ideal_dcg(std::vector<double> rel) {
  std::sort(rel.begin(), rel.end(), std::greater<>());
  return dcg(rel);
}

double normalized(double d, double idcg) {
  if (!(idcg > 0.0)) return 1.0;
  return std::clamp(d / idcg, 0.0, 1.0);
}

}  // namespace

std::vector<double> relevance_in_candidate_order(const SensitivityRanking& gt,
                                                 const SensitivityRanking& cand) {
  const auto kg = keyed(gt);
  const auto kc = keyed(cand);
  check_same_flips(gt, cand, kg, kc);
  std::vector<double> rel;
  rel.reserve(cand.items.size());
  for (const auto& it : cand.items) {
    const Keyed probe{Edge{it.flip.i, it.flip.j}, 0.0};
    rel.push_back(std::lower_bound(kg.begin(), kg.end(), probe)->score);
  }
  return rel;
}

double ndcg_of_sequence(const std::vector<double>& relevance) {
  return normalized(dcg(relevance), ideal_dcg(relevance));
}

double ndcg(const SensitivityRanking& gt, const SensitivityRanking& cand) {
  return ndcg_of_sequence(relevance_in_candidate_order(gt, cand));
}

double randomization_test(const SensitivityRanking& gt, const SensitivityRanking& cand,
                          std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("randomization test needs n_samples >= 1");
  std::vector<double> rel = relevance_in_candidate_order(gt, cand);
  const double idcg = ideal_dcg(rel);
  const double observed = normalized(dcg(rel), idcg);
  // Shuffle a fixed base order so the samples depend only on (seed, size).
  std::sort(rel.begin(), rel.end(), std::greater<>());
  std::vector<std::size_t> perm(rel.size());
  std::mt19937_64 rng(seed);
  std::vector<double> shuffled(rel.size());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t r = 0; r < perm.size(); ++r) shuffled[r] = rel[perm[r]];
    if (normalized(dcg(shuffled), idcg) >= observed) ++hits;
  }
  return static_cast<double>(1 + hits) / static_cast<double>(n_samples + 1);
}

RankingComparison compare_rankings(const SensitivityRanking& gt, const SensitivityRanking& cand,
                                   std::size_t n_samples, std::uint64_t seed) {
  RankingComparison c;
  c.ground_truth = gt;
  c.candidate = cand;
  c.ndcg = ndcg(gt, cand);
  c.p_value = randomization_test(gt, cand, n_samples, seed);
  c.n_samples = n_samples;
  return c;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t s = 0; s < idx.size();) {
    std::size_t e = s;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
    const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
    for (std::size_t t = s; t <= e; ++t) r[idx[t]] = avg;
    s = e + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length samples of size >= 2");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    sab += (ra[k] - ma) * (rb[k] - mb);
    saa += (ra[k] - ma) * (ra[k] - ma);
    sbb += (rb[k] - mb) * (rb[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double spearman(const SensitivityRanking& a, const SensitivityRanking& b) {
  const auto ka = keyed(a);
  const auto kb = keyed(b);
  std::vector<double> va, vb;
  std::size_t x = 0, y = 0;
  while (x < ka.size() && y < kb.size()) {
    if (ka[x].key < kb[y].key) {
      ++x;
    } else if (kb[y].key < ka[x].key) {
      ++y;
    } else {
      va.push_back(ka[x++].score);
      vb.push_back(kb[y++].score);
    }
  }
  return spearman(va, vb);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

BenchmarkReport benchmark_runtime(const Graph& g, const EmbedResult& base,
                                  const std::vector<Method>& methods, std::size_t sample_flips,
                                  std::uint64_t seed, const std::string& dataset) {
  if (sample_flips == 0) throw std::invalid_argument("sample_flips must be >= 1");
  BenchmarkReport rep;
  rep.kernel = std::string(kernels::active().name);
  rep.compiler = compiler_id();
  rep.hardware_threads = std::thread::hardware_concurrency();
  rep.num_nodes = g.num_nodes();
  rep.num_edges = g.num_edges();
  rep.dim = base.coords.dim();

  const auto all = enumerate_flips(g);
  std::vector<EdgeFlip> sample = all;
  std::mt19937_64 rng(seed);
  std::shuffle(sample.begin(), sample.end(), rng);
  sample.resize(std::min(sample_flips, sample.size()));

  volatile double sink = 0.0;
  for (Method m : methods) {
    TimingRecord rec;
    rec.method = m;
    rec.dataset = dataset;
    switch (m) {
      case Method::RE:
      case Method::IPRE: {
        const auto t0 = Clock::now();
        for (const auto& f : sample)
          sink = sink + (m == Method::RE ? sensitivity_re(g, base, f, false).score
                                         : sensitivity_ipre(g, base, f, false).score);
        rec.flips_measured = sample.size();
        rec.seconds_per_flip = seconds_since(t0) / static_cast<double>(sample.size());
        break;
      }
      case Method::Approx: {
        auto t0 = Clock::now();
        const HessianBlockStore blocks(g, base);
        rec.precompute_seconds = seconds_since(t0);
        t0 = Clock::now();
        for (const auto& f : all) sink = sink + sensitivity_approx(g, base, f, blocks, false).score;
        rec.flips_measured = all.size();
        rec.seconds_per_flip = seconds_since(t0) / static_cast<double>(all.size());
        break;
      }
      case Method::ApproxExact: {
        auto t0 = Clock::now();
        const FullHessian h(g, base);
        rec.precompute_seconds = seconds_since(t0);
        t0 = Clock::now();
        for (const auto& f : all) sink = sink + sensitivity_approx_exact(g, base, f, h, false).score;
        rec.flips_measured = all.size();
        rec.seconds_per_flip = seconds_since(t0) / static_cast<double>(all.size());
        break;
      }
    }
    // Clock granularity can make a very fast sweep read as zero.
    rec.seconds_per_flip = std::max(rec.seconds_per_flip, 1e-12);
    rep.records.push_back(rec);
  }
  return rep;
}

BenchmarkReport benchmark_runtime(const Graph& g, const EmbeddingConfig& cfg,
                                  const std::vector<Method>& methods, std::size_t sample_flips,
                                  std::uint64_t seed, const std::string& dataset) {
  const EmbedResult base = embed(g, cfg);
  return benchmark_runtime(g, base, methods, sample_flips, seed, dataset);
}

}  // namespace cne
