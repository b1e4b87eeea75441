#include "mlog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace mlog {

namespace {

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return 0.5 * c;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Solves (JtJ + lambda diag(JtJ)) step = -g for n <= a handful of params.
bool solve_damped(const std::vector<std::vector<double>>& jtj,
                  const std::vector<double>& g, double lambda,
                  std::vector<double>* step) {
  const std::size_t n = g.size();
  std::vector<std::vector<double>> a(jtj);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] += lambda * std::max(jtj[i][i], 1e-12);
    b[i] = -g[i];
  }
  // Gaussian elimination with partial pivoting.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  step->assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * (*step)[c];
    (*step)[ri] = s / a[ri][ri];
  }
  return true;
}

} // namespace

bool NlsProblem::valid() const {
  const std::size_t n = initial_guess.size();
  if (n == 0 || !eval) return false;
  if (lower_bounds.size() != n || upper_bounds.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower_bounds[i] < upper_bounds[i])) return false;
    if (initial_guess[i] < lower_bounds[i] || initial_guess[i] > upper_bounds[i])
      return false;
  }
  return true;
}

NlsSolution solve(const NlsProblem& problem, const SolveOptions& opts) {
  if (!problem.valid()) throw std::invalid_argument("solve: malformed problem");
  const std::size_t n = problem.initial_guess.size();

  auto clamp = [&](std::vector<double>& p) {
    for (std::size_t i = 0; i < n; ++i)
      p[i] = std::clamp(p[i], problem.lower_bounds[i], problem.upper_bounds[i]);
  };

  std::vector<double> params = problem.initial_guess;
  NlsEval ev = problem.eval(params);
  if (!all_finite(ev.residuals))
    throw std::invalid_argument("solve: non-finite residuals at the initial guess");

  NlsSolution sol;
  sol.params = params;
  double cost = cost_of(ev.residuals);
  sol.final_cost = cost;

  double lambda = opts.lambda_init;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (cost < 1e-30) {
      sol.converged = true;
      break;
    }
    const std::size_t m = ev.residuals.size();
    if (m == 0 || ev.jacobian.size() != n) break;

    // Normal equations.
    std::vector<std::vector<double>> jtj(n, std::vector<double>(n, 0.0));
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j2 = i; j2 < n; ++j2) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += ev.jacobian[i][k] * ev.jacobian[j2][k];
        jtj[i][j2] = jtj[j2][i] = s;
      }
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += ev.jacobian[i][k] * ev.residuals[k];
      grad[i] = s;
    }
    double gmax = 0.0;
    for (double gi : grad) gmax = std::max(gmax, std::abs(gi));
    if (gmax < opts.tol) {
      sol.converged = true;
      break;
    }

    // Try a damped step; inflate lambda until one is accepted.
    bool accepted = false;
    while (lambda < 1e14) {
      std::vector<double> step;
      if (!solve_damped(jtj, grad, lambda, &step)) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> trial = params;
      for (std::size_t i = 0; i < n; ++i) trial[i] += step[i];
      clamp(trial);
      NlsEval trial_ev = problem.eval(trial);
      const double trial_cost =
          all_finite(trial_ev.residuals) ? cost_of(trial_ev.residuals)
                                         : std::numeric_limits<double>::infinity();
      if (trial_cost < cost) {
        const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
        params = trial;
        ev = std::move(trial_ev);
        cost = trial_cost;
        sol.params = params;
        sol.final_cost = cost;
        lambda = std::max(lambda / 10.0, 1e-14);
        accepted = true;
        if (rel < opts.tol) sol.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    sol.iterations = iter + 1;
    if (!accepted) {
      // No descent direction within the damping budget; report the best
      // point. Treat an (almost) zero gradient as convergence.
      sol.converged = sol.converged || gmax < std::sqrt(opts.tol);
      break;
    }
    if (sol.converged) break;
  }
  return sol;
}

} // namespace mlog
