#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ks/mesh.hpp"

namespace ks {

// Couplings k_ij = (grad phi_j, grad phi_i), stored as one value per mesh
// edge (aligned with mesh.edges) plus the diagonal. Rows sum to zero up to
// roundoff; on weakly acute meshes all off-diagonal couplings are <= 0.
struct StiffnessMatrix {
  std::vector<double> diag;     // per node
  std::vector<double> offdiag;  // per edge
};

StiffnessMatrix assemble_stiffness(const Mesh& mesh);

// Lumped P1 mass: m_i = sum of |T|/3 over incident triangles. All m_i > 0
// on a valid mesh, and the total equals the domain area.
struct LumpedMass {
  std::vector<double> m;
  double domain_area = 0.0;
};

LumpedMass assemble_lumped_mass(const Mesh& mesh);

// Lumped inner product sum_i m_i x_i y_i. Throws std::invalid_argument on
// length mismatch.
double inner_h(std::span<const double> x, std::span<const double> y,
               const LumpedMass& M);

// y_i = sum_{j adjacent to i} k_ij (x_j - x_i). Equals the matrix-vector
// product K x up to the (zero) row sums, and vanishes identically on
// constant vectors.
std::vector<double> apply_stiffness(const Mesh& mesh, const StiffnessMatrix& K,
                                    std::span<const double> x);

// x^T K y evaluated edgewise: -sum_{i<j} k_ij (x_j - x_i)(y_j - y_i).
// Nonnegative for x == y on weakly acute meshes.
double stiffness_product(const Mesh& mesh, const StiffnessMatrix& K,
                         std::span<const double> x, std::span<const double> y);

double max_abs_row_sum(const Mesh& mesh, const StiffnessMatrix& K);

using ScalarField = std::function<double(Vec2)>;

// Nodal interpolation: result_i = f(a_i).
std::vector<double> interp_nodal(const ScalarField& f, const Mesh& mesh);

// For each node the incident triangle of smallest index; the triangle whose
// average defines interp_average at that node.
std::vector<int> default_triangle_assoc(const Mesh& mesh);

// result_i = average of f over the associated triangle, computed with a
// fixed 7-point degree-5 quadrature rule. Preserves pointwise bounds of f
// (all quadrature weights are positive).
std::vector<double> interp_average(const ScalarField& f, const Mesh& mesh,
                                   const std::vector<int>& assoc);

// Value of the P1 field x at point p (searches all triangles; intended for
// tests and coarse/fine comparisons, not inner loops).
double eval_p1(const Mesh& mesh, std::span<const double> x, Vec2 p);

}  // namespace ks
