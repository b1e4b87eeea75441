#include "mlog/grid_model.hpp"

#include <cmath>
#include <stdexcept>

namespace mlog {

namespace {
constexpr double kSingularCos = 1e-9;
}

double principal_offset(double h, double eps_c) {
  if (h <= 0.0) throw std::invalid_argument("principal_offset: h must be > 0");
  if (std::abs(eps_c) >= kPi / 2.0)
    throw std::invalid_argument("principal_offset: |eps_c| must be < pi/2");
  return h * std::tan(eps_c);
}

std::optional<double> project_ground_distance(double c, double h, double f,
                                              double eps_c) {
  if (h <= 0.0) throw std::invalid_argument("project_ground_distance: h must be > 0");
  const double phi = std::atan(c / h);
  const double delta = phi - eps_c;
  const double cos_delta = std::cos(delta);
  if (std::abs(delta) >= kPi / 2.0 || std::abs(cos_delta) < kSingularCos)
    return std::nullopt; // line at the horizon
  return c * std::cos(phi) * f / (cos_delta * h);
}

long label_to_index(long j, double o, double m, double s_p) {
  if (m <= 0.0) throw std::invalid_argument("label_to_index: m must be > 0");
  return j + long(std::floor((s_p - o) / m));
}

std::optional<double> model_rho(long j, const AxisModelParams& p) {
  const double s_p = principal_offset(p.h, p.eps_c);
  const long i = label_to_index(j, p.o, p.m, s_p);
  const double s = p.m * double(i + 1) - p.o;
  const auto g_line = project_ground_distance(s, p.h, p.f, p.eps_c);
  const auto g_principal = project_ground_distance(s_p, p.h, p.f, p.eps_c);
  if (!g_line || !g_principal) return std::nullopt;
  return *g_line - *g_principal;
}

ResidualsJacobian residuals_and_jacobian(std::span<const LabeledLine> lines,
                                         const AxisModelParams& p, double center) {
  ResidualsJacobian out;
  if (lines.empty()) return out;
  const double s_p = principal_offset(p.h, p.eps_c);
  const double cos_eps = std::cos(p.eps_c);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const long i = label_to_index(lines[k].label, p.o, p.m, s_p);
    const double s = p.m * double(i + 1) - p.o;
    const double den = p.h * cos_eps + s * std::sin(p.eps_c);
    const auto rho_mod = model_rho(lines[k].label, p);
    if (!rho_mod || std::abs(den) < 1e-9) continue;
    const double d = center - lines[k].rho_c; // signed center distance
    out.residuals.push_back(d - *rho_mod);
    // rho_mod = g(s) - g(s_p) with g(c) = f c / (h cos e + c sin e);
    // g(s_p) = f sin(e) is independent of h and o.
    const double den2 = den * den;
    out.d_res_d_o.push_back(p.f * p.h * cos_eps / den2);
    out.d_res_d_h.push_back(p.f * s * cos_eps / den2);
    out.used.push_back(int(k));
  }
  return out;
}

} // namespace mlog
