#pragma once

#include <span>
#include <vector>

#include "ks/fem.hpp"
#include "ks/mesh.hpp"

namespace ks {

struct SchemeParams {
  double chi = 1.0;            // chemotaxis strength; scales the flux and its stabilizer
  double q_detector = 2.0;     // exponent of the extremum detector
  double eps_equal = 1e-12;    // relative band treating edge endpoint values as equal
  double tol_acute = 1e-12;    // acuteness tolerance for mesh admission
  double series_switch = 1e-6; // relative threshold for series evaluation of edge values

  void validate() const;  // throws std::invalid_argument
};

struct State {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

// Mean of x/(1+x) over the two endpoint values. In [0,1) for nonnegative
// arguments (rounding saturates it at 1 for arguments beyond ~1e16).
double saturation_mean(double ui, double uj);

// Density value assigned to an edge in the chemotaxis flux:
//   saturation_mean * (log(1+uj) - log(1+ui)) / (1/(1+ui) - 1/(1+uj)),
// evaluated in cancellation-safe form; equals ui when ui == uj. Satisfies
// 0 <= value <= sqrt((1+ui)(1+uj)).
double edge_density(double ui, double uj, const SchemeParams& p);

// (ui - edge_density) / (uj - ui), extended by its limit -1/2 at equal
// endpoints. Always in [-1, 1].
double edge_density_slope(double ui, double uj, const SchemeParams& p);

// Normalized one-sided slope imbalance at node i for the nodal field x:
//   ( [sum_j jump_ij]_+ / sum_j 2*avg_ij )^q
// where jump and avg combine the slope toward each patch neighbor with the
// slope toward its symmetric point (skipped when absent). Returns 0 when the
// denominator is below 1e-300. Values lie in [0,1]; equals 1 exactly at a
// strict local minimum over the patch including symmetric values.
double shock_detector(const Mesh& mesh, const SymmetricStencil& stencil,
                      std::span<const double> x, int i, double q);

std::vector<double> shock_detectors(const Mesh& mesh,
                                    const SymmetricStencil& stencil,
                                    std::span<const double> x, double q);

// Candidate stabilization coupling contributed by the chemotaxis flux on the
// ordered pair (i,j):
//   chi * (log v_j - log v_i) * edge_density_slope(u_i,u_j) * k_ij,
// and 0 when |u_j - u_i| <= eps_equal*(2+u_i+u_j).
double edge_flux_compensation(std::span<const double> u,
                              std::span<const double> v, int i, int j,
                              double k_ij, const SchemeParams& p);

// Stabilization coefficient of the unordered edge {i,j}:
//   max{ alpha_i * f_ij, alpha_j * f_ji, 0 }.
// Symmetric in (i,j) and nonnegative.
double stabilization_coeff(std::span<const double> u,
                           std::span<const double> v, int i, int j,
                           double k_ij, double alpha_i, double alpha_j,
                           const SchemeParams& p);

// Nodal time derivative of u. Per unordered edge {i,j} with coupling k_ij:
//   d = k_ij (u_j - u_i),  g = edge_density * (log v_j - log v_i) * k_ij,
//   s = stabilization_coeff * (u_j - u_i);
// row i accumulates -d + chi*g + s, row j the negative, and each row is
// divided by its lumped mass. The weighted sum of the result against the
// lumped masses vanishes (mass conservation). Throws std::domain_error if
// any v_i <= 0.
std::vector<double> rhs_u(const State& s, const Mesh& mesh,
                          const StiffnessMatrix& K, const LumpedMass& M,
                          const SymmetricStencil& stencil,
                          const SchemeParams& p);

// Nodal time derivative of v: -(1/m_i) sum_j k_ij v_j - u_i v_i.
std::vector<double> rhs_v(const State& s, const Mesh& mesh,
                          const StiffnessMatrix& K, const LumpedMass& M);

}  // namespace ks
