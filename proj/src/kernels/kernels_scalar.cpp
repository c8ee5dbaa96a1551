#include <algorithm>
#include <cmath>

#include "cne/kernels.hpp"
#include "kernel_common.hpp"

namespace cne::kernels {
namespace {

void pair_row_scalar(const PairModel& model, std::size_t dim, const double* xi, const double* xt,
                     std::size_t stride, const std::uint8_t* adj_row, std::size_t begin,
                     std::size_t end, double* grad, double* prob_out, double* loglik) {
  double ll = 0.0;
  double g[kMaxDim] = {};
  for (std::size_t j = begin; j < end; ++j) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = xt[c * stride + j] - xi[c];
      d2 += diff * diff;
    }
    const double p = detail::link_probability(model, d2);
    if (prob_out) prob_out[j] = p;
    const double a = adj_row[j] ? 1.0 : 0.0;
    ll += adj_row[j] ? std::log(p) : std::log(1.0 - p);
    const double coef = model.gamma * (a - p);
    for (std::size_t c = 0; c < dim; ++c) g[c] += coef * (xt[c * stride + j] - xi[c]);
  }
  for (std::size_t c = 0; c < dim; ++c) grad[c] += g[c];
  *loglik += ll;
}

double bernoulli_kl_scalar(const double* p, const double* q, std::size_t count) {
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = detail::clamp_prob(p[k]);
    const double b = detail::clamp_prob(q[k]);
    sum += a * (std::log(a) - std::log(b)) + (1.0 - a) * (std::log(1.0 - a) - std::log(1.0 - b));
  }
  return sum;
}

double quad_form_row_scalar(std::size_t dim, const double* xi, const double* w, const double* xt,
                            std::size_t stride, const double* prob_row, std::size_t begin,
                            std::size_t end) {
  double sum = 0.0;
  for (std::size_t l = begin; l < end; ++l) {
    double proj = 0.0;
    for (std::size_t c = 0; c < dim; ++c) proj += (xi[c] - xt[c * stride + l]) * w[c];
    const double p = prob_row[l];
    sum += p * (1.0 - p) * proj * proj;
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", pair_row_scalar, bernoulli_kl_scalar,
                                 quad_form_row_scalar};
  return table;
}

}  // namespace cne::kernels
