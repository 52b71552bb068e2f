#include "sepmark/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace sepmark {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct CurvaturePair {
  std::vector<double> s, y;
  double rho = 0.0;
};

}  // namespace

LbfgsResult minimize(const ObjectiveFn& objective, std::vector<double> x0,
                     const LbfgsConfig& config,
                     const IterationCallback& callback) {
  const std::size_t dim = x0.size();
  LbfgsResult result;

  std::vector<double> x = std::move(x0);
  std::vector<double> grad(dim, 0.0);
  double value = objective(x, grad);
  double gnorm = norm(grad);

  double best_value = value;
  std::vector<double> best_x = x;
  std::vector<double> best_grad = grad;

  std::deque<CurvaturePair> pairs;
  std::vector<double> direction(dim);
  std::vector<double> x_trial(dim);
  std::vector<double> grad_trial(dim, 0.0);

  auto eval = [&](double alpha) {
    for (std::size_t j = 0; j < dim; ++j) x_trial[j] = x[j] + alpha * direction[j];
    const double v = objective(x_trial, grad_trial);
    if (v < best_value) {
      best_value = v;
      best_x = x_trial;
      best_grad = grad_trial;
    }
    return v;
  };

  if (gnorm <= config.grad_tolerance) result.converged = true;

  for (int iter = 1; !result.converged && iter <= config.max_iterations; ++iter) {
    // two-loop recursion: direction = -H * grad
    direction = grad;
    std::vector<double> alpha_mem(pairs.size());
    for (std::size_t i = pairs.size(); i-- > 0;) {
      alpha_mem[i] = pairs[i].rho * dot(pairs[i].s, direction);
      for (std::size_t j = 0; j < dim; ++j) {
        direction[j] -= alpha_mem[i] * pairs[i].y[j];
      }
    }
    if (!pairs.empty()) {
      const CurvaturePair& last = pairs.back();
      const double gamma = 1.0 / (last.rho * dot(last.y, last.y));
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double beta = pairs[i].rho * dot(pairs[i].y, direction);
      for (std::size_t j = 0; j < dim; ++j) {
        direction[j] += (alpha_mem[i] - beta) * pairs[i].s[j];
      }
    }
    for (double& d : direction) d = -d;

    double dphi0 = dot(direction, grad);
    if (!(dphi0 < 0.0)) {
      pairs.clear();
      for (std::size_t j = 0; j < dim; ++j) direction[j] = -grad[j];
      dphi0 = -dot(grad, grad);
    }

    // strong Wolfe line search: bracket a step, then bisect into it
    const double phi0 = value;
    double alpha = pairs.empty()
                       ? std::min(1.0, 1.0 / std::max(1e-12, gnorm))
                       : 1.0;
    double alpha_prev = 0.0;
    double phi_prev = phi0;
    double phi_new = phi0;
    double lo = 0.0, hi = 0.0, phi_lo = phi0;
    bool found = false, bracketed = false;
    int evals = 0;
    while (evals < config.max_line_search) {
      phi_new = eval(alpha);
      ++evals;
      if (phi_new > phi0 + config.wolfe_c1 * alpha * dphi0 ||
          (evals > 1 && phi_new >= phi_prev)) {
        lo = alpha_prev;
        hi = alpha;
        phi_lo = phi_prev;
        bracketed = true;
        break;
      }
      const double dphi = dot(grad_trial, direction);
      if (std::abs(dphi) <= -config.wolfe_c2 * dphi0) {
        found = true;
        break;
      }
      if (dphi >= 0.0) {
        lo = alpha;
        hi = alpha_prev;
        phi_lo = phi_new;
        bracketed = true;
        break;
      }
      alpha_prev = alpha;
      phi_prev = phi_new;
      alpha *= 2.0;
      if (alpha > 1e12) break;
    }
    while (!found && bracketed && evals < config.max_line_search) {
      alpha = 0.5 * (lo + hi);
      if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(hi))) break;
      phi_new = eval(alpha);
      ++evals;
      if (phi_new > phi0 + config.wolfe_c1 * alpha * dphi0 || phi_new >= phi_lo) {
        hi = alpha;
      } else {
        const double dphi = dot(grad_trial, direction);
        if (std::abs(dphi) <= -config.wolfe_c2 * dphi0) {
          found = true;
          break;
        }
        if (dphi * (hi - lo) >= 0.0) hi = lo;
        lo = alpha;
        phi_lo = phi_new;
      }
    }

    if (!found) {
      result.line_search_failed = true;
      break;
    }

    CurvaturePair pair;
    pair.s.resize(dim);
    pair.y.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      pair.s[j] = x_trial[j] - x[j];
      pair.y[j] = grad_trial[j] - grad[j];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * norm(pair.s) * norm(pair.y)) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (static_cast<int>(pairs.size()) > config.history) pairs.pop_front();
    }

    x = x_trial;
    grad = grad_trial;
    value = phi_new;
    gnorm = norm(grad);
    result.iterations = iter;
    if (callback) callback(iter, value, gnorm, x);
    if (gnorm <= config.grad_tolerance) result.converged = true;
  }

  result.x = std::move(best_x);
  result.value = best_value;
  result.grad_norm = norm(best_grad);
  return result;
}

}  // namespace sepmark
