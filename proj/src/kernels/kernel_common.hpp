#pragma once

#include <algorithm>
#include <cmath>

#include "cne/kernels.hpp"

namespace cne::kernels::detail {

// exp() stays finite and normal on this range.
inline constexpr double kExpArgMin = -708.0;
inline constexpr double kExpArgMax = 708.0;

inline double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

inline double link_probability(const PairModel& model, double dist2) {
  const double t = std::clamp(0.5 * model.gamma * dist2 - model.offset, kExpArgMin, kExpArgMax);
  return clamp_prob(1.0 / (1.0 + std::exp(t)));
}

}  // namespace cne::kernels::detail
