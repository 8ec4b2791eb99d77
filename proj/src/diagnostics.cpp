#include "ks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ks {

DiagnosticsRecord snapshot(const State& s, const Mesh& mesh,
                           const StiffnessMatrix& K, const LumpedMass& M,
                           double v_max_bound) {
  const std::size_t n = mesh.num_nodes();
  if (s.u.size() != n || s.v.size() != n) {
    throw std::invalid_argument("snapshot: state size mismatch");
  }
  DiagnosticsRecord r;
  r.t = s.t;
  r.min_u = s.u[0];
  r.max_u = s.u[0];
  r.min_v = s.v[0];
  r.max_v = s.v[0];
  std::vector<double> w(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = s.u[i], vi = s.v[i], mi = M.m[i];
    r.mass_u += mi * ui;
    r.l1_v += mi * vi;
    r.min_u = std::min(r.min_u, ui);
    r.max_u = std::max(r.max_u, ui);
    r.min_v = std::min(r.min_v, vi);
    r.max_v = std::max(r.max_v, vi);
    r.l2h_v_sq += mi * vi * vi;
    r.reac_sq += mi * ui * vi * vi;
    w[i] = std::log(v_max_bound / vi);
    z[i] = std::log1p(ui);
    r.w_l1 += mi * w[i];
    r.z_l1 += mi * z[i];
  }
  r.grad_v_sq = stiffness_product(mesh, K, s.v, s.v);
  r.grad_w_sq = stiffness_product(mesh, K, w, w);
  r.grad_z_sq = stiffness_product(mesh, K, z, z);
  return r;
}

void accumulate(DiagnosticsRecord& r, const DiagnosticsRecord& prev) {
  const double half_dt = 0.5 * (r.t - prev.t);
  r.int_grad_v_sq = prev.int_grad_v_sq + half_dt * (prev.grad_v_sq + r.grad_v_sq);
  r.int_reac_sq = prev.int_reac_sq + half_dt * (prev.reac_sq + r.reac_sq);
  r.int_grad_w_sq = prev.int_grad_w_sq + half_dt * (prev.grad_w_sq + r.grad_w_sq);
  r.int_grad_z_sq = prev.int_grad_z_sq + half_dt * (prev.grad_z_sq + r.grad_z_sq);
}

namespace {

void require_records(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("energy check: no records");
  }
}

}  // namespace

double check_energy_v(std::span<const DiagnosticsRecord> records) {
  require_records(records);
  const DiagnosticsRecord& a = records.front();
  double worst = 0.0;
  for (const DiagnosticsRecord& r : records) {
    const double res =
        r.l2h_v_sq + r.int_grad_v_sq + r.int_reac_sq - a.l2h_v_sq;
    worst = std::max(worst, res);
  }
  return worst;
}

double check_energy_w(std::span<const DiagnosticsRecord> records) {
  require_records(records);
  const DiagnosticsRecord& a = records.front();
  double worst = 0.0;
  for (const DiagnosticsRecord& r : records) {
    const double res = r.w_l1 + r.int_grad_w_sq - r.t * a.mass_u - a.w_l1;
    worst = std::max(worst, res);
  }
  return worst;
}

double check_energy_z(std::span<const DiagnosticsRecord> records) {
  require_records(records);
  const DiagnosticsRecord& a = records.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (const DiagnosticsRecord& r : records) {
    const double res =
        r.int_grad_z_sq - 4.0 * ((1.0 + r.t) * a.mass_u + a.w_l1);
    worst = std::max(worst, res);
  }
  return worst;
}

double default_tol_energy(double dt_max, double t, double mass_u0) {
  return 1e-6 + 10.0 * dt_max * (1.0 + t) * mass_u0;
}

}  // namespace ks
