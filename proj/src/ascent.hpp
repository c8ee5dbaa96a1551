#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cne/embedding.hpp"

namespace cne::detail {

struct AscentSettings {
  double learning_rate = 0.2;
  std::size_t max_iter = 2000;
  double ftol = 1e-7;
};

inline constexpr int kMaxHalvings = 40;

/// Gradient ascent on a flat parameter vector. Each iteration tries the base
/// step and halves it until the objective increases, so the recorded
/// trace is increasing. Stops when the relative objective change drops
/// below ftol, no ascent step exists, or max_iter is hit.
///
/// eval(params, grad) returns the objective and writes the gradient.
template <class Eval>
EmbedDiagnostics gradient_ascent(std::vector<double>& params, Eval&& eval,
                                 const AscentSettings& s) {
  EmbedDiagnostics diag;
  std::vector<double> grad(params.size()), trial(params.size()), trial_grad(params.size());
  double f = eval(params, grad);
  diag.objective_trace.push_back(f);
  if (!std::isfinite(f)) throw ConvergenceError("non-finite objective at start", diag);

  for (std::size_t it = 0; it < s.max_iter; ++it) {
    double step = s.learning_rate;
    bool accepted = false;
    double f_trial = f;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t k = 0; k < params.size(); ++k) trial[k] = params[k] + step * grad[k];
      f_trial = eval(trial, trial_grad);
      if (!std::isfinite(f_trial)) {
        diag.final_objective = f;
        throw ConvergenceError("non-finite objective during ascent", diag);
      }
      if (f_trial > f) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++diag.step_halvings;
    }
    if (!accepted) {
      diag.converged = true;
      break;
    }
    const double rel =
        std::abs(f_trial - f) / std::max(std::abs(f), std::numeric_limits<double>::min());
    params.swap(trial);
    grad.swap(trial_grad);
    f = f_trial;
    ++diag.iterations;
    diag.objective_trace.push_back(f);
    if (rel < s.ftol) {
      diag.converged = true;
      break;
    }
  }
  diag.final_objective = f;
  return diag;
}

}  // namespace cne::detail
