#pragma once

#include <span>

#include "ks/fem.hpp"
#include "ks/scheme.hpp"

namespace ks {

// Scalar functionals of one accepted state. w_i = log(v_max_bound / v_i) and
// z_i = log(1 + u_i) are the transformed fields whose gradients enter the
// energy checks; all quadratic forms are nonnegative on weakly acute meshes.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass_u = 0.0;     // sum_i m_i u_i
  double l1_v = 0.0;       // sum_i m_i v_i
  double min_u = 0.0, max_u = 0.0;
  double min_v = 0.0, max_v = 0.0;
  double l2h_v_sq = 0.0;   // sum_i m_i v_i^2
  double grad_v_sq = 0.0;  // v^T K v
  double reac_sq = 0.0;    // sum_i m_i u_i v_i^2
  double w_l1 = 0.0;       // sum_i m_i w_i
  double grad_w_sq = 0.0;  // w^T K w
  double z_l1 = 0.0;       // sum_i m_i z_i
  double grad_z_sq = 0.0;  // z^T K z
  // Trapezoidal time integrals from t = 0, filled in by accumulate().
  double int_grad_v_sq = 0.0;
  double int_reac_sq = 0.0;
  double int_grad_w_sq = 0.0;
  double int_grad_z_sq = 0.0;
};

DiagnosticsRecord snapshot(const State& s, const Mesh& mesh,
                           const StiffnessMatrix& K, const LumpedMass& M,
                           double v_max_bound);

// Extends the running integrals of prev to r by the trapezoid rule.
void accumulate(DiagnosticsRecord& r, const DiagnosticsRecord& prev);

// Energy residuals over a record sequence starting at t = 0. Each should
// not exceed the corresponding tolerance on a valid trajectory (the last
// one should be <= 0):
//   v:  l2h_v_sq(t) + int (grad_v_sq + reac_sq) - l2h_v_sq(0)
//   w:  w_l1(t) + int grad_w_sq - t*mass_u(0) - w_l1(0)
//   z:  int grad_z_sq - 4*((1+t)*mass_u(0) + w_l1(0))
double check_energy_v(std::span<const DiagnosticsRecord> records);
double check_energy_w(std::span<const DiagnosticsRecord> records);
double check_energy_z(std::span<const DiagnosticsRecord> records);

double default_tol_energy(double dt_max, double t, double mass_u0);

}  // namespace ks
