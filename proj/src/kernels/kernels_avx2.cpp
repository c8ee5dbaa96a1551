#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "avx2_math.hpp"
#include "cne/kernels.hpp"
#include "kernel_common.hpp"

namespace cne::kernels {
namespace {

using avx2::exp_pd;
using avx2::hsum;
using avx2::log_pd;

inline __m256d clamp_prob_pd(__m256d p) {
  return _mm256_min_pd(_mm256_max_pd(p, _mm256_set1_pd(kProbEps)),
                       _mm256_set1_pd(1.0 - kProbEps));
}

inline __m256d load_adjacency(const std::uint8_t* adj) {
  std::int32_t word;
  std::memcpy(&word, adj, sizeof(word));
  return _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(_mm_cvtsi32_si128(word)));
}

void pair_row_avx2(const PairModel& model, std::size_t dim, const double* xi, const double* xt,
                   std::size_t stride, const std::uint8_t* adj_row, std::size_t begin,
                   std::size_t end, double* grad, double* prob_out, double* loglik) {
  __m256d acc[kMaxDim];
  __m256d xiv[kMaxDim];
  for (std::size_t c = 0; c < dim; ++c) {
    acc[c] = _mm256_setzero_pd();
    xiv[c] = _mm256_set1_pd(xi[c]);
  }
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half_gamma = _mm256_set1_pd(0.5 * model.gamma);
  const __m256d gamma = _mm256_set1_pd(model.gamma);
  const __m256d offset = _mm256_set1_pd(model.offset);
  const __m256d tmin = _mm256_set1_pd(detail::kExpArgMin);
  const __m256d tmax = _mm256_set1_pd(detail::kExpArgMax);
  __m256d llv = _mm256_setzero_pd();

  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    __m256d d2 = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(xt + c * stride + j), xiv[c]);
      d2 = _mm256_fmadd_pd(diff, diff, d2);
    }
    __m256d t = _mm256_fmsub_pd(half_gamma, d2, offset);
    t = _mm256_min_pd(_mm256_max_pd(t, tmin), tmax);
    const __m256d p = clamp_prob_pd(_mm256_div_pd(one, _mm256_add_pd(one, exp_pd(t))));
    if (prob_out) _mm256_storeu_pd(prob_out + j, p);

    const __m256d a = load_adjacency(adj_row + j);
    const __m256d linked = _mm256_cmp_pd(a, _mm256_setzero_pd(), _CMP_NEQ_OQ);
    llv = _mm256_add_pd(llv, log_pd(_mm256_blendv_pd(_mm256_sub_pd(one, p), p, linked)));

    const __m256d coef = _mm256_mul_pd(gamma, _mm256_sub_pd(a, p));
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(xt + c * stride + j), xiv[c]);
      acc[c] = _mm256_fmadd_pd(coef, diff, acc[c]);
    }
  }

  double ll = hsum(llv);
  for (std::size_t c = 0; c < dim; ++c) grad[c] += hsum(acc[c]);
  if (j < end) scalar_kernels().pair_row(model, dim, xi, xt, stride, adj_row, j, end, grad,
                                         prob_out, &ll);
  *loglik += ll;
}

double bernoulli_kl_avx2(const double* p, const double* q, std::size_t count) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d sum = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d a = clamp_prob_pd(_mm256_loadu_pd(p + k));
    const __m256d b = clamp_prob_pd(_mm256_loadu_pd(q + k));
    const __m256d na = _mm256_sub_pd(one, a);
    const __m256d nb = _mm256_sub_pd(one, b);
    const __m256d t1 = _mm256_mul_pd(a, _mm256_sub_pd(log_pd(a), log_pd(b)));
    sum = _mm256_add_pd(sum, _mm256_fmadd_pd(na, _mm256_sub_pd(log_pd(na), log_pd(nb)), t1));
  }
  double total = hsum(sum);
  if (k < count) total += scalar_kernels().bernoulli_kl(p + k, q + k, count - k);
  return total;
}

double quad_form_row_avx2(std::size_t dim, const double* xi, const double* w, const double* xt,
                          std::size_t stride, const double* prob_row, std::size_t begin,
                          std::size_t end) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d sum = _mm256_setzero_pd();
  std::size_t l = begin;
  for (; l + 4 <= end; l += 4) {
    __m256d proj = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dim; ++c) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_set1_pd(xi[c]), _mm256_loadu_pd(xt + c * stride + l));
      proj = _mm256_fmadd_pd(diff, _mm256_set1_pd(w[c]), proj);
    }
    const __m256d p = _mm256_loadu_pd(prob_row + l);
    const __m256d pq = _mm256_mul_pd(p, _mm256_sub_pd(one, p));
    sum = _mm256_fmadd_pd(pq, _mm256_mul_pd(proj, proj), sum);
  }
  double total = hsum(sum);
  if (l < end)
    total += scalar_kernels().quad_form_row(dim, xi, w, xt, stride, prob_row, l, end);
  return total;
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", pair_row_avx2, bernoulli_kl_avx2, quad_form_row_avx2};
  return table;
}
}  // namespace detail

}  // namespace cne::kernels
