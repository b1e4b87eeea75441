#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

// Small bounded nonlinear least-squares solver (Levenberg-Marquardt with
// projection onto box constraints). Problems here have one or two
// parameters, so the normal equations are solved in closed form.

namespace mlog {

struct NlsEval {
  std::vector<double> residuals;
  // Jacobian in column-major blocks: jacobian[c][i] = d residual_i / d p_c.
  std::vector<std::vector<double>> jacobian;
};

struct NlsProblem {
  std::function<NlsEval(std::span<const double>)> eval;
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
  std::vector<double> initial_guess;

  bool valid() const;
};

struct NlsSolution {
  std::vector<double> params;
  double final_cost = 0.0; ///< 1/2 sum r^2
  int iterations = 0;
  bool converged = false;
};

struct SolveOptions {
  int max_iter = 50;
  double tol = 1e-10;        ///< relative cost decrease / gradient max-norm
  double lambda_init = 1e-3; ///< Marquardt damping
};

/// Levenberg-Marquardt with clamping to the box after every accepted step.
/// Accepted steps never increase the cost; the best parameters seen are
/// always returned. Converged when the relative cost decrease or the
/// gradient max-norm falls below tol. Throws std::invalid_argument when the
/// problem is malformed or the residuals at the initial guess are not
/// finite.
NlsSolution solve(const NlsProblem& problem, const SolveOptions& opts = {});

} // namespace mlog
