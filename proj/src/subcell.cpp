#include "mlog/subcell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mlog/solver.hpp"

namespace mlog {

namespace {

constexpr double kBadCost = 1e9;

AxisModelParams make_params(double o, double h, double m, const CameraModel& cam,
                            Axis axis) {
  AxisModelParams p;
  p.o = o;
  p.h = h;
  p.m = m;
  p.f = cam.f;
  // The per-axis mounting tilt is the negated slope-map offset: the offset
  // cancels the mount in the angle estimate, while the model needs the
  // mount itself.
  p.eps_c = axis == Axis::Y ? -cam.eps_c_alpha : -cam.eps_c_beta;
  return p;
}

} // namespace

std::optional<AxisResult> localize_axis(std::span<const LabeledLine> lines, Axis axis,
                                        const CameraModel& cam, const GridSpec& grid,
                                        const std::optional<AxisResult>& prev,
                                        const PipelineConfig& cfg) {
  if (lines.empty()) return std::nullopt;

  const double m = axis == Axis::Y ? grid.m_y : grid.m_x;
  const double center = axis == Axis::Y ? cam.cx : cam.cy;

  const bool have_prev = prev.has_value() && prev->accepted;
  const double h_pin = have_prev ? prev->h : cfg.nominal_height;
  double o_init = have_prev ? prev->o : m / 2.0;
  o_init = std::clamp(o_init, 0.0, m - 1e-9);
  const double h_init = std::clamp(h_pin, cfg.min_height, cfg.max_height);

  const bool solve_h = lines.size() >= 2;

  NlsProblem problem;
  if (solve_h) {
    problem.initial_guess = {o_init, h_init};
    problem.lower_bounds = {0.0, cfg.min_height};
    problem.upper_bounds = {m - 1e-9, cfg.max_height};
  } else {
    problem.initial_guess = {o_init};
    problem.lower_bounds = {0.0};
    problem.upper_bounds = {m - 1e-9};
  }
  problem.eval = [&, solve_h](std::span<const double> params) {
    const double o = params[0];
    const double h = solve_h ? params[1] : h_pin;
    const AxisModelParams p = make_params(o, h, m, cam, axis);
    const ResidualsJacobian rj = residuals_and_jacobian(lines, p, center);
    NlsEval ev;
    if (rj.residuals.empty()) {
      // Every line is at the projection singularity for this hypothesis;
      // make the step unattractive instead of reporting a perfect fit.
      ev.residuals.assign(lines.size(), kBadCost);
      ev.jacobian.assign(solve_h ? 2 : 1, std::vector<double>(lines.size(), 0.0));
      return ev;
    }
    ev.residuals = rj.residuals;
    ev.jacobian.push_back(rj.d_res_d_o);
    if (solve_h) ev.jacobian.push_back(rj.d_res_d_h);
    return ev;
  };

  // Unusable frame: every line singular at the initial guess.
  {
    const AxisModelParams p0 = make_params(o_init, h_init, m, cam, axis);
    if (residuals_and_jacobian(lines, p0, center).residuals.empty()) return std::nullopt;
  }

  const NlsSolution sol = solve(problem, {});

  AxisResult res;
  res.o = sol.params[0];
  res.h = solve_h ? sol.params[1] : h_pin;
  res.final_cost = sol.final_cost;
  res.degraded = !solve_h;
  res.n_lines = int(lines.size());
  const double gate = cfg.energy_ratio_eps_e *
                      std::max(have_prev ? prev->final_cost : 0.0, kEnergyFloor);
  const bool energy_ok = have_prev ? sol.final_cost < gate : true;
  res.accepted = sol.converged && energy_ok;
  return res;
}

FusedResult fuse_axes(const std::optional<AxisResult>& x,
                      const std::optional<AxisResult>& y, double prev_o_x,
                      double prev_o_y, double prev_h) {
  const bool xa = x.has_value() && x->accepted;
  const bool ya = y.has_value() && y->accepted;
  if (!xa && !ya)
    throw std::invalid_argument("fuse_axes: at least one axis must be accepted");

  FusedResult fused;
  fused.x_accepted = xa;
  fused.y_accepted = ya;
  fused.partial = xa != ya;
  fused.o_x = xa ? x->o : prev_o_x;
  fused.o_y = ya ? y->o : prev_o_y;
  fused.cost_x = x ? x->final_cost : 0.0;
  fused.cost_y = y ? y->final_cost : 0.0;

  // Height: line-count-weighted mean over the axes that actually observed
  // it (degraded single-line solves carry a pinned h, not an estimate).
  double weight = 0.0, sum = 0.0;
  if (xa && !x->degraded) {
    weight += x->n_lines;
    sum += x->h * x->n_lines;
  }
  if (ya && !y->degraded) {
    weight += y->n_lines;
    sum += y->h * y->n_lines;
  }
  if (weight > 0.0)
    fused.h = sum / weight;
  else if (xa)
    fused.h = x->h;
  else if (ya)
    fused.h = y->h;
  else
    fused.h = prev_h;
  return fused;
}

} // namespace mlog
