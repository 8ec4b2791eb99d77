#include "ks/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ks/fem.hpp"

namespace ks {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2 p0 = nodes[tri[0]], p1 = nodes[tri[1]], p2 = nodes[tri[2]];
  return 0.5 * cross(p1 - p0, p2 - p0);
}

namespace {

// Longest edge of a triangle; doubles as its diameter.
double triangle_diameter(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  double d = 0.0;
  for (int a = 0; a < 3; ++a) {
    d = std::max(d, norm(mesh.nodes[tri[(a + 1) % 3]] - mesh.nodes[tri[a]]));
  }
  return d;
}

// Shared by the generator and the loader: normalizes orientation, validates
// connectivity, and fills in all derived fields.
void finalize_mesh(Mesh& mesh, bool check_quasi_uniformity,
                   double min_rho = 1e-3) {
  const int n_nodes = mesh.num_nodes();
  if (n_nodes < 3 || mesh.triangles.empty()) {
    throw MeshError("mesh needs at least 3 nodes and 1 triangle");
  }

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      if (tri[a] < 0 || tri[a] >= n_nodes) {
        throw MeshError("triangle " + std::to_string(t) +
                        ": node index out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError("triangle " + std::to_string(t) + ": repeated node");
    }
    double area = mesh.triangle_area(static_cast<int>(t));
    if (area < 0.0) {
      std::swap(tri[1], tri[2]);
      area = -area;
    }
    const double diam = triangle_diameter(mesh, static_cast<int>(t));
    if (area <= 1e-12 * diam * diam) {
      throw MeshError("triangle " + std::to_string(t) + ": degenerate");
    }
  }

  std::map<std::array<int, 3>, int> seen;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    std::array<int, 3> key = mesh.triangles[t];
    std::sort(key.begin(), key.end());
    auto [it, inserted] = seen.emplace(key, static_cast<int>(t));
    if (!inserted) {
      throw MeshError("non-conforming mesh: triangles " +
                      std::to_string(it->second) + " and " + std::to_string(t) +
                      " repeat the same node triple");
    }
  }

  std::map<std::array<int, 2>, int> edge_count;
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      int i = tri[a], j = tri[(a + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_count[{i, j}];
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(edge_count.size());
  for (const auto& [e, count] : edge_count) {
    if (count > 2) {
      throw MeshError("non-conforming mesh: edge (" + std::to_string(e[0]) +
                      "," + std::to_string(e[1]) + ") shared by " +
                      std::to_string(count) + " triangles");
    }
    mesh.edges.push_back(e);
  }

  mesh.node_patch.assign(n_nodes, {});
  mesh.node_triangles.assign(n_nodes, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int a = 0; a < 3; ++a) {
      const int i = mesh.triangles[t][a];
      mesh.node_triangles[i].push_back(static_cast<int>(t));
      for (int b = 0; b < 3; ++b) {
        mesh.node_patch[i].push_back(mesh.triangles[t][b]);
      }
    }
  }
  for (int i = 0; i < n_nodes; ++i) {
    if (mesh.node_triangles[i].empty()) {
      throw MeshError("node " + std::to_string(i) +
                      " does not belong to any triangle");
    }
    auto& patch = mesh.node_patch[i];
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    auto& tris = mesh.node_triangles[i];
    std::sort(tris.begin(), tris.end());
  }

  mesh.h = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    mesh.h = std::max(mesh.h, triangle_diameter(mesh, t));
  }
  double min_edge = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.edges) {
    min_edge = std::min(min_edge, norm(mesh.nodes[e[1]] - mesh.nodes[e[0]]));
  }
  mesh.rho = min_edge / mesh.h;
  if (check_quasi_uniformity && mesh.rho < min_rho) {
    throw MeshError("mesh fails the quasi-uniformity check: min edge / max "
                    "diameter = " +
                    std::to_string(mesh.rho));
  }
}

}  // namespace

Mesh build_structured_mesh(int n, Rect domain) {
  if (n < 1) throw MeshError("structured mesh needs n >= 1");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw MeshError("structured mesh needs a nondegenerate rectangle");
  }
  const double hx = (domain.x1 - domain.x0) / n;
  const double hy = (domain.y1 - domain.y0) / n;

  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int iy = 0; iy <= n; ++iy) {
    for (int ix = 0; ix <= n; ++ix) {
      mesh.nodes.push_back({domain.x0 + ix * hx, domain.y0 + iy * hy});
    }
  }
  mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
  const auto id = [n](int ix, int iy) { return iy * (n + 1) + ix; };
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int v00 = id(ix, iy), v10 = id(ix + 1, iy);
      const int v01 = id(ix, iy + 1), v11 = id(ix + 1, iy + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  finalize_mesh(mesh, false);
  return mesh;
}

namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back({tok, line_no});
  }
  return tokens;
}

class TokenReader {
 public:
  explicit TokenReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  int last_line() const {
    return tokens_.empty() ? 0 : tokens_.back().line;
  }

  const Token& next(const std::string& what) {
    if (done()) {
      throw MeshError("unexpected end of file, expected " + what);
    }
    return tokens_[pos_++];
  }

  void expect_keyword(const std::string& kw) {
    const Token& t = next("'" + kw + "'");
    if (t.text != kw) {
      throw MeshError("line " + std::to_string(t.line) + ": expected '" + kw +
                      "', got '" + t.text + "'");
    }
  }

  long expect_int(const std::string& what) {
    const Token& t = next(what);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(t.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.text.size()) {
      throw MeshError("line " + std::to_string(t.line) + ": expected " + what +
                      ", got '" + t.text + "'");
    }
    return value;
  }

  double expect_double(const std::string& what) {
    const Token& t = next(what);
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(t.text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.text.size()) {
      throw MeshError("line " + std::to_string(t.line) + ": expected " + what +
                      ", got '" + t.text + "'");
    }
    return value;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  TokenReader reader(tokenize(in));

  reader.expect_keyword("nodes");
  const long n_nodes = reader.expect_int("node count");
  if (n_nodes <= 0) throw MeshError("node count must be positive");
  Mesh mesh;
  mesh.nodes.reserve(n_nodes);
  for (long i = 0; i < n_nodes; ++i) {
    const double x = reader.expect_double("node x coordinate");
    const double y = reader.expect_double("node y coordinate");
    mesh.nodes.push_back({x, y});
  }

  reader.expect_keyword("triangles");
  const long n_tris = reader.expect_int("triangle count");
  if (n_tris <= 0) throw MeshError("triangle count must be positive");
  mesh.triangles.reserve(n_tris);
  for (long t = 0; t < n_tris; ++t) {
    const int a = static_cast<int>(reader.expect_int("triangle node index"));
    const int b = static_cast<int>(reader.expect_int("triangle node index"));
    const int c = static_cast<int>(reader.expect_int("triangle node index"));
    mesh.triangles.push_back({a, b, c});
  }
  if (!reader.done()) {
    throw MeshError("line " + std::to_string(reader.last_line()) +
                    ": trailing content after triangle list");
  }

  finalize_mesh(mesh, true);
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open mesh file for writing: " + path);
  char buf[64];
  out << "nodes " << mesh.num_nodes() << "\n";
  for (const Vec2& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  out << "triangles " << mesh.num_triangles() << "\n";
  for (const auto& tri : mesh.triangles) {
    out << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  }
  if (!out) throw MeshError("failed writing mesh file: " + path);
}

namespace {

struct RayHit {
  double t;  // position along the ray, in units of |a_i - a_j|
  double gamma;
  int k1, k2;
};

// Intersect the ray a_i + t*dir (t > 0) with the segment [b, c]; appends a
// snapped hit when one exists.
void intersect_ray_segment(const Mesh& mesh, int i, Vec2 dir, int b, int c,
                           std::vector<RayHit>& hits) {
  const Vec2 pb = mesh.nodes[b], pc = mesh.nodes[c];
  const Vec2 e = pc - pb;
  const Vec2 rhs = pb - mesh.nodes[i];
  const double det = -dir.x * e.y + e.x * dir.y;
  const double scale = norm(dir) * norm(e);
  if (std::abs(det) <= 1e-14 * scale) return;  // parallel
  const double t = (-rhs.x * e.y + e.x * rhs.y) / det;
  const double s = (dir.x * rhs.y - dir.y * rhs.x) / det;
  if (t <= 1e-12 || s < -1e-9 || s > 1.0 + 1e-9) return;

  RayHit hit;
  hit.t = t;
  if (s <= 1e-9) {
    hit.gamma = 1.0;
    hit.k1 = b;
    hit.k2 = c;
  } else if (s >= 1.0 - 1e-9) {
    hit.gamma = 1.0;
    hit.k1 = c;
    hit.k2 = b;
  } else {
    hit.gamma = 1.0 - s;
    hit.k1 = b;
    hit.k2 = c;
  }
  hits.push_back(hit);
}

}  // namespace

SymmetricStencil compute_symmetric_stencils(const Mesh& mesh) {
  SymmetricStencil stencil;
  stencil.rays.resize(mesh.num_nodes());
  std::vector<RayHit> hits;

  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (int j : mesh.node_patch[i]) {
      if (j == i) continue;
      StencilEntry entry;
      entry.j = j;
      entry.r_ij_len = norm(mesh.nodes[j] - mesh.nodes[i]);
      const Vec2 dir = mesh.nodes[i] - mesh.nodes[j];

      hits.clear();
      for (int t : mesh.node_triangles[i]) {
        const auto& tri = mesh.triangles[t];
        int opp[2], n_opp = 0;
        for (int a = 0; a < 3; ++a) {
          if (tri[a] != i) opp[n_opp++] = tri[a];
        }
        int b = opp[0], c = opp[1];
        if (b > c) std::swap(b, c);
        intersect_ray_segment(mesh, i, dir, b, c, hits);
      }

      if (!hits.empty()) {
        double t_min = hits[0].t;
        for (const RayHit& h : hits) t_min = std::min(t_min, h.t);
        const RayHit* best = nullptr;
        for (const RayHit& h : hits) {
          if (h.t > t_min * (1.0 + 1e-9)) continue;
          if (best == nullptr || h.k1 < best->k1 ||
              (h.k1 == best->k1 && h.k2 < best->k2)) {
            best = &h;
          }
        }
        entry.present = true;
        entry.gamma = std::clamp(best->gamma, 0.0, 1.0);
        entry.k1 = best->k1;
        entry.k2 = best->k2;
        const Vec2 p = entry.gamma * mesh.nodes[entry.k1] +
                       (1.0 - entry.gamma) * mesh.nodes[entry.k2];
        entry.r_sym_len = norm(p - mesh.nodes[i]);
      }
      stencil.rays[i].push_back(entry);
    }
  }
  return stencil;
}

Vec2 stencil_point(const Mesh& mesh, const StencilEntry& e) {
  return e.gamma * mesh.nodes[e.k1] + (1.0 - e.gamma) * mesh.nodes[e.k2];
}

AcutenessReport check_weak_acuteness(const Mesh& mesh,
                                     const StiffnessMatrix& K, double tol) {
  AcutenessReport report;
  report.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const double k = K.offdiag[e];
    report.worst = std::max(report.worst, k);
    if (k > tol) {
      report.violations.push_back({mesh.edges[e][0], mesh.edges[e][1], k});
    }
  }
  report.pass = report.violations.empty();
  return report;
}

}  // namespace ks
