#pragma once

// Pairwise inner loops of the CNE model, in a scalar reference form and
// vectorized variants. All variants share one contract; the active table is
// chosen once at startup from CPU features (override: CNE_KERNELS=scalar).
//
// Coordinates are passed transposed ("SoA"): coordinate c of node j lives at
// xt[c * stride + j], so a vector lane walks consecutive nodes.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cne::kernels {

inline constexpr std::size_t kMaxDim = 32;
inline constexpr double kProbEps = 1e-12;

/// Link probability as a logistic function of the squared distance:
/// P = 1 / (1 + exp(0.5 * gamma * dist2 - offset)), then clamped to
/// [kProbEps, 1 - kProbEps].
struct PairModel {
  double gamma = 0.75;
  double offset = 0.0;
};

/// Accumulates, for j in [begin, end):
///   *loglik += a_ij ? log P_ij : log(1 - P_ij)
///   grad[c] += gamma * (a_ij - P_ij) * (x_jc - x_ic)
///   prob_out[j] = P_ij                      (when prob_out != nullptr)
/// The caller keeps j == i out of the range.
using PairRowFn = void (*)(const PairModel& model, std::size_t dim, const double* xi,
                           const double* xt, std::size_t stride, const std::uint8_t* adj_row,
                           std::size_t begin, std::size_t end, double* grad, double* prob_out,
                           double* loglik);

/// Sum over [0, count) of the Bernoulli KL p log(p/q) + (1-p) log((1-p)/(1-q)),
/// both arguments clamped to [kProbEps, 1 - kProbEps].
using BernoulliKlFn = double (*)(const double* p, const double* q, std::size_t count);

/// Sum over l in [begin, end) of P_l (1 - P_l) ((x_i - x_l) . w)^2.
using QuadFormRowFn = double (*)(std::size_t dim, const double* xi, const double* w,
                                 const double* xt, std::size_t stride, const double* prob_row,
                                 std::size_t begin, std::size_t end);

struct KernelTable {
  std::string_view name;
  PairRowFn pair_row;
  BernoulliKlFn bernoulli_kl;
  QuadFormRowFn quad_form_row;
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// The table used by the library.
const KernelTable& active();

/// Forces a table by name ("scalar", "avx2"); returns false if unavailable.
bool select(std::string_view name);

}  // namespace cne::kernels
