#pragma once

#include <cstddef>
#include <vector>

#include "cne/graph.hpp"
#include "cne/kernels.hpp"

namespace cne::detail {

void transpose_into(const double* x, std::size_t n, std::size_t d, double* xt);

/// Log-likelihood of g at the flat row-major coordinates x; writes the full
/// gradient. xt is scratch space for the transposed coordinates.
double full_objective(const Graph& g, const kernels::PairModel& model, std::size_t d,
                      const double* x, double* grad, std::vector<double>& xt);

}  // namespace cne::detail
