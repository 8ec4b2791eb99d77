#include "ks/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ks {

void SchemeParams::validate() const {
  if (!(chi >= 0.0)) {
    throw std::invalid_argument("scheme: chi must be >= 0");
  }
  if (!(q_detector > 0.0)) {
    throw std::invalid_argument("scheme: q_detector must be > 0");
  }
  if (!(eps_equal > 0.0 && eps_equal < 1.0)) {
    throw std::invalid_argument("scheme: eps_equal must be in (0,1)");
  }
  if (!(tol_acute > 0.0 && tol_acute < 1.0)) {
    throw std::invalid_argument("scheme: tol_acute must be in (0,1)");
  }
  if (!(series_switch > 0.0 && series_switch < 1.0)) {
    throw std::invalid_argument("scheme: series_switch must be in (0,1)");
  }
}

double saturation_mean(double ui, double uj) {
  return 0.5 * (ui / (1.0 + ui) + uj / (1.0 + uj));
}

double edge_density(double ui, double uj, const SchemeParams& p) {
  if (ui == uj) return ui;
  const double a = 1.0 + ui;
  const double d = uj - ui;
  double g;
  if (std::abs(d) <= p.series_switch * a) {
    g = a + 0.5 * d - d * d / (6.0 * a);
  } else {
    const double b = 1.0 + uj;
    g = a * b * std::log1p(d / a) / d;
  }
  return saturation_mean(ui, uj) * g;
}

double edge_density_slope(double ui, double uj, const SchemeParams& p) {
  if (ui == uj) return -0.5;
  const double a = 1.0 + ui;
  const double d = uj - ui;
  if (std::abs(d) <= p.series_switch * a) {
    // Expansion of (ui - saturation_mean*g)/d around d = 0; avoids the
    // cancellation of the direct quotient.
    return -0.5 + d / (6.0 * a) + d * (a - d) / (12.0 * a * a * (a + d));
  }
  return (ui - edge_density(ui, uj, p)) / d;
}

double shock_detector(const Mesh&, const SymmetricStencil& stencil,
                      std::span<const double> x, int i, double q) {
  double num = 0.0, den = 0.0;
  for (const StencilEntry& e : stencil.rays[i]) {
    const double d1 = (x[e.j] - x[i]) / e.r_ij_len;
    num += d1;
    den += std::abs(d1);
    if (e.present) {
      const double xs = e.gamma * x[e.k1] + (1.0 - e.gamma) * x[e.k2];
      const double d2 = (xs - x[i]) / e.r_sym_len;
      num += d2;
      den += std::abs(d2);
    }
  }
  if (den < 1e-300) return 0.0;
  const double ratio = std::max(num, 0.0) / den;
  return std::pow(ratio, q);
}

std::vector<double> shock_detectors(const Mesh& mesh,
                                    const SymmetricStencil& stencil,
                                    std::span<const double> x, double q) {
  std::vector<double> alpha(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    alpha[i] = shock_detector(mesh, stencil, x, i, q);
  }
  return alpha;
}

namespace {

bool endpoints_equal(double ui, double uj, const SchemeParams& p) {
  return std::abs(uj - ui) <= p.eps_equal * (2.0 + ui + uj);
}

}  // namespace

double edge_flux_compensation(std::span<const double> u,
                              std::span<const double> v, int i, int j,
                              double k_ij, const SchemeParams& p) {
  if (endpoints_equal(u[i], u[j], p)) return 0.0;
  const double dlv = std::log(v[j]) - std::log(v[i]);
  return p.chi * dlv * edge_density_slope(u[i], u[j], p) * k_ij;
}

double stabilization_coeff(std::span<const double> u,
                           std::span<const double> v, int i, int j,
                           double k_ij, double alpha_i, double alpha_j,
                           const SchemeParams& p) {
  const double fij = edge_flux_compensation(u, v, i, j, k_ij, p);
  const double fji = edge_flux_compensation(u, v, j, i, k_ij, p);
  return std::max({alpha_i * fij, alpha_j * fji, 0.0});
}

std::vector<double> rhs_u(const State& s, const Mesh& mesh,
                          const StiffnessMatrix& K, const LumpedMass& M,
                          const SymmetricStencil& stencil,
                          const SchemeParams& p) {
  const std::size_t n = mesh.num_nodes();
  if (s.u.size() != n || s.v.size() != n) {
    throw std::invalid_argument("rhs_u: state size mismatch");
  }
  std::vector<double> logv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.v[i] > 0.0)) {
      throw std::domain_error("rhs_u: v must be positive (node " +
                              std::to_string(i) + ")");
    }
    logv[i] = std::log(s.v[i]);
  }
  const std::vector<double> alpha =
      shock_detectors(mesh, stencil, s.u, p.q_detector);

  std::vector<double> acc(n, 0.0);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const int i = mesh.edges[e][0], j = mesh.edges[e][1];
    const double k = K.offdiag[e];
    const double du = s.u[j] - s.u[i];
    const double dlv = logv[j] - logv[i];
    const double d = k * du;
    const double g = edge_density(s.u[i], s.u[j], p) * dlv * k;
    double beta = 0.0;
    if (!endpoints_equal(s.u[i], s.u[j], p)) {
      const double fij =
          p.chi * dlv * edge_density_slope(s.u[i], s.u[j], p) * k;
      const double fji =
          p.chi * -dlv * edge_density_slope(s.u[j], s.u[i], p) * k;
      beta = std::max({alpha[i] * fij, alpha[j] * fji, 0.0});
    }
    const double flow = -d + p.chi * g + beta * du;
    acc[i] += flow;
    acc[j] -= flow;
  }
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) F[i] = acc[i] / M.m[i];
  return F;
}

std::vector<double> rhs_v(const State& s, const Mesh& mesh,
                          const StiffnessMatrix& K, const LumpedMass& M) {
  const std::size_t n = mesh.num_nodes();
  if (s.u.size() != n || s.v.size() != n) {
    throw std::invalid_argument("rhs_v: state size mismatch");
  }
  const std::vector<double> Kv = apply_stiffness(mesh, K, s.v);
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) {
    F[i] = -Kv[i] / M.m[i] - s.u[i] * s.v[i];
  }
  return F;
}

}  // namespace ks
