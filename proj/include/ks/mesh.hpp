#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace ks {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conforming triangulation of a polygonal domain. Immutable after
// construction; all derived connectivity is filled in by the factory
// functions below.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // CCW after normalization
  std::vector<std::array<int, 2>> edges;      // unordered pairs, i<j, stored once
  std::vector<std::vector<int>> node_patch;   // nodes of supp(phi_i), sorted, includes i
  std::vector<std::vector<int>> node_triangles;  // incident triangles, sorted
  double h = 0.0;    // max triangle diameter
  double rho = 0.0;  // min edge length / h (quasi-uniformity witness)

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
};

// Uniform triangulation of an axis-aligned rectangle: n x n cells, each split
// along the same diagonal into two right triangles. (n+1)^2 nodes ordered
// lexicographically by (y, x). All angles <= 90 degrees.
Mesh build_structured_mesh(int n, Rect domain = Rect{});

// Text format: "nodes N" / N lines "x y" / "triangles M" / M lines "i j k"
// (0-based). Lines starting with '#' are comments. Throws MeshError on parse
// failure, non-conforming connectivity, or degenerate triangles.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

// Per-ordered-pair symmetric node: the exit point of the ray from node i in
// direction (a_i - a_j) through the boundary of the patch of node i,
// expressed as a convex combination of the two patch-boundary nodes of the
// crossed segment. Absent (present=false) when the ray immediately leaves
// the domain.
struct StencilEntry {
  int j = -1;
  bool present = false;
  double gamma = 0.0;  // value at the symmetric point: gamma*x[k1] + (1-gamma)*x[k2]
  int k1 = -1;
  int k2 = -1;
  double r_ij_len = 0.0;   // |a_j - a_i|
  double r_sym_len = 0.0;  // |a_sym - a_i|, > 0 when present
};

struct SymmetricStencil {
  // rays[i] holds one entry per patch neighbor j of node i, sorted by j.
  std::vector<std::vector<StencilEntry>> rays;
};

SymmetricStencil compute_symmetric_stencils(const Mesh& mesh);

// Position of the symmetric point of an entry (for tests and geometry checks).
Vec2 stencil_point(const Mesh& mesh, const StencilEntry& e);

struct StiffnessMatrix;  // fem.hpp

struct AcutenessReport {
  bool pass = true;
  double worst = 0.0;  // max off-diagonal coupling encountered
  struct Violation {
    int i, j;
    double coupling;
  };
  std::vector<Violation> violations;
};

// Pass iff every off-diagonal stiffness coupling is <= tol (weak acuteness).
AcutenessReport check_weak_acuteness(const Mesh& mesh, const StiffnessMatrix& K,
                                     double tol = 1e-12);

}  // namespace ks
