#pragma once

#include <functional>
#include <vector>

namespace sepmark {

// Evaluates the function at x, fills the gradient, returns the value.
using ObjectiveFn =
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

// Called after every accepted step with the new iterate.
using IterationCallback = std::function<void(
    int iteration, double value, double grad_norm, const std::vector<double>& x)>;

struct LbfgsConfig {
  int max_iterations = 100;
  double grad_tolerance = 1e-5;  // stop when the gradient 2-norm drops below
  int history = 10;              // stored curvature pairs
  double wolfe_c1 = 1e-4;        // sufficient decrease
  double wolfe_c2 = 0.9;         // curvature
  int max_line_search = 40;      // trials per step before giving up
};

struct LbfgsResult {
  std::vector<double> x;  // best iterate seen
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;          // tolerance reached
  bool line_search_failed = false;
};

// Limited-memory BFGS minimization with the two-loop recursion and a strong
// Wolfe line search. Deterministic; a failed line search returns the best
// iterate instead of throwing.
LbfgsResult minimize(const ObjectiveFn& objective, std::vector<double> x0,
                     const LbfgsConfig& config = {},
                     const IterationCallback& callback = {});

}  // namespace sepmark
