#include "ks/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace ks {

namespace {

std::uint64_t edge_key(int i, int j) {
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

std::unordered_map<std::uint64_t, int> edge_index(const Mesh& mesh) {
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    index.emplace(edge_key(mesh.edges[e][0], mesh.edges[e][1]),
                  static_cast<int>(e));
  }
  return index;
}

// Gradients of the three barycentric coordinates on a CCW triangle.
std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int t,
                                          double area) {
  const auto& tri = mesh.triangles[t];
  std::array<Vec2, 3> grad;
  for (int a = 0; a < 3; ++a) {
    const Vec2 pj = mesh.nodes[tri[(a + 1) % 3]];
    const Vec2 pk = mesh.nodes[tri[(a + 2) % 3]];
    grad[a] = {(pj.y - pk.y) / (2.0 * area), (pk.x - pj.x) / (2.0 * area)};
  }
  return grad;
}

}  // namespace

StiffnessMatrix assemble_stiffness(const Mesh& mesh) {
  StiffnessMatrix K;
  K.diag.assign(mesh.num_nodes(), 0.0);
  K.offdiag.assign(mesh.edges.size(), 0.0);
  const auto index = edge_index(mesh);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.triangle_area(t);
    const auto grad = barycentric_gradients(mesh, t, area);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      K.diag[tri[a]] += area * dot(grad[a], grad[a]);
      for (int b = a + 1; b < 3; ++b) {
        int i = tri[a], j = tri[b];
        if (i > j) std::swap(i, j);
        K.offdiag[index.at(edge_key(i, j))] += area * dot(grad[a], grad[b]);
      }
    }
  }
  return K;
}

LumpedMass assemble_lumped_mass(const Mesh& mesh) {
  LumpedMass M;
  M.m.assign(mesh.num_nodes(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double third = mesh.triangle_area(t) / 3.0;
    for (int a = 0; a < 3; ++a) M.m[mesh.triangles[t][a]] += third;
    M.domain_area += mesh.triangle_area(t);
  }
  return M;
}

double inner_h(std::span<const double> x, std::span<const double> y,
               const LumpedMass& M) {
  if (x.size() != M.m.size() || y.size() != M.m.size()) {
    throw std::invalid_argument("inner_h: vector length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += M.m[i] * x[i] * y[i];
  return sum;
}

std::vector<double> apply_stiffness(const Mesh& mesh, const StiffnessMatrix& K,
                                    std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(mesh.num_nodes())) {
    throw std::invalid_argument("apply_stiffness: vector length mismatch");
  }
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const int i = mesh.edges[e][0], j = mesh.edges[e][1];
    const double d = K.offdiag[e] * (x[j] - x[i]);
    y[i] += d;
    y[j] -= d;
  }
  return y;
}

double stiffness_product(const Mesh& mesh, const StiffnessMatrix& K,
                         std::span<const double> x,
                         std::span<const double> y) {
  if (x.size() != static_cast<std::size_t>(mesh.num_nodes()) ||
      y.size() != x.size()) {
    throw std::invalid_argument("stiffness_product: vector length mismatch");
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const int i = mesh.edges[e][0], j = mesh.edges[e][1];
    sum -= K.offdiag[e] * (x[j] - x[i]) * (y[j] - y[i]);
  }
  return sum;
}

double max_abs_row_sum(const Mesh& mesh, const StiffnessMatrix& K) {
  std::vector<double> row(K.diag.begin(), K.diag.end());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    row[mesh.edges[e][0]] += K.offdiag[e];
    row[mesh.edges[e][1]] += K.offdiag[e];
  }
  double worst = 0.0;
  for (double r : row) worst = std::max(worst, std::abs(r));
  return worst;
}

std::vector<double> interp_nodal(const ScalarField& f, const Mesh& mesh) {
  std::vector<double> values(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) values[i] = f(mesh.nodes[i]);
  return values;
}

std::vector<int> default_triangle_assoc(const Mesh& mesh) {
  std::vector<int> assoc(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    assoc[i] = mesh.node_triangles[i].front();  // sorted: smallest index
  }
  return assoc;
}

namespace {

// 7-point degree-5 rule on the reference triangle; weights sum to 1 and are
// all positive, so averages of f stay within its pointwise bounds.
struct QuadPoint {
  double l0, l1, l2, w;
};

const std::array<QuadPoint, 7>& quad7() {
  static const std::array<QuadPoint, 7> rule = [] {
    const double s = std::sqrt(15.0);
    const double b1 = (6.0 - s) / 21.0, a1 = 1.0 - 2.0 * b1;
    const double b2 = (6.0 + s) / 21.0, a2 = 1.0 - 2.0 * b2;
    const double w0 = 9.0 / 40.0;
    const double w1 = (155.0 - s) / 1200.0;
    const double w2 = (155.0 + s) / 1200.0;
    return std::array<QuadPoint, 7>{{{1. / 3, 1. / 3, 1. / 3, w0},
                                     {a1, b1, b1, w1},
                                     {b1, a1, b1, w1},
                                     {b1, b1, a1, w1},
                                     {a2, b2, b2, w2},
                                     {b2, a2, b2, w2},
                                     {b2, b2, a2, w2}}};
  }();
  return rule;
}

}  // namespace

std::vector<double> interp_average(const ScalarField& f, const Mesh& mesh,
                                   const std::vector<int>& assoc) {
  if (assoc.size() != static_cast<std::size_t>(mesh.num_nodes())) {
    throw std::invalid_argument("interp_average: assoc length mismatch");
  }
  std::vector<double> values(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const int t = assoc[i];
    if (t < 0 || t >= mesh.num_triangles()) {
      throw std::invalid_argument("interp_average: bad triangle association");
    }
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]],
               p2 = mesh.nodes[tri[2]];
    double avg = 0.0;
    for (const QuadPoint& q : quad7()) {
      avg += q.w * f(q.l0 * p0 + q.l1 * p1 + q.l2 * p2);
    }
    values[i] = avg;
  }
  return values;
}

double eval_p1(const Mesh& mesh, std::span<const double> x, Vec2 p) {
  if (x.size() != static_cast<std::size_t>(mesh.num_nodes())) {
    throw std::invalid_argument("eval_p1: vector length mismatch");
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]],
               p2 = mesh.nodes[tri[2]];
    const double two_a = cross(p1 - p0, p2 - p0);
    const double l0 = cross(p1 - p, p2 - p) / two_a;
    const double l1 = cross(p2 - p, p0 - p) / two_a;
    const double l2 = cross(p0 - p, p1 - p) / two_a;
    const double tol = -1e-12;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      return l0 * x[tri[0]] + l1 * x[tri[1]] + l2 * x[tri[2]];
    }
  }
  throw std::invalid_argument("eval_p1: point outside the mesh");
}

}  // namespace ks
