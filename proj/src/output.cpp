#include "ks/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ks {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_diagnostics_csv(std::ostream& os,
                           std::span<const DiagnosticsRecord> records) {
  os << "t,mass_u,l1_v,min_u,max_u,min_v,max_v,l2h_v_sq,grad_v_sq,reac_sq,"
        "w_l1,grad_w_sq,z_l1,grad_z_sq,int_grad_v_sq,int_reac_sq,"
        "int_grad_w_sq,int_grad_z_sq\n";
  for (const DiagnosticsRecord& r : records) {
    os << fmt(r.t) << ',' << fmt(r.mass_u) << ',' << fmt(r.l1_v) << ','
       << fmt(r.min_u) << ',' << fmt(r.max_u) << ',' << fmt(r.min_v) << ','
       << fmt(r.max_v) << ',' << fmt(r.l2h_v_sq) << ',' << fmt(r.grad_v_sq)
       << ',' << fmt(r.reac_sq) << ',' << fmt(r.w_l1) << ','
       << fmt(r.grad_w_sq) << ',' << fmt(r.z_l1) << ',' << fmt(r.grad_z_sq)
       << ',' << fmt(r.int_grad_v_sq) << ',' << fmt(r.int_reac_sq) << ','
       << fmt(r.int_grad_w_sq) << ',' << fmt(r.int_grad_z_sq) << '\n';
  }
}

void write_diagnostics_csv(const std::string& path,
                           std::span<const DiagnosticsRecord> records) {
  std::ofstream out = open_out(path);
  write_diagnostics_csv(out, records);
}

namespace {

struct Transformed {
  std::vector<double> w, z;
};

Transformed transform_fields(const State& s, double v_max_bound) {
  Transformed t;
  t.w.resize(s.v.size());
  t.z.resize(s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    t.w[i] = std::log(v_max_bound / s.v[i]);
    t.z[i] = std::log1p(s.u[i]);
  }
  return t;
}

}  // namespace

void write_fields_csv(const std::string& path, const Mesh& mesh,
                      const State& s, double v_max_bound) {
  std::ofstream out = open_out(path);
  const Transformed t = transform_fields(s, v_max_bound);
  out << "node_id,x,y,u,v,w,z\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out << i << ',' << fmt(mesh.nodes[i].x) << ',' << fmt(mesh.nodes[i].y)
        << ',' << fmt(s.u[i]) << ',' << fmt(s.v[i]) << ',' << fmt(t.w[i])
        << ',' << fmt(t.z[i]) << '\n';
  }
}

void write_fields_vtk(const std::string& path, const Mesh& mesh,
                      const State& s, double v_max_bound) {
  std::ofstream out = open_out(path);
  const Transformed t = transform_fields(s, v_max_bound);
  out << "# vtk DataFile Version 3.0\n";
  out << "cell density and signal at t = " << fmt(s.t) << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Vec2& p : mesh.nodes) {
    out << fmt(p.x) << ' ' << fmt(p.y) << " 0\n";
  }
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles()
      << '\n';
  for (const auto& tri : mesh.triangles) {
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int c = 0; c < mesh.num_triangles(); ++c) out << "5\n";
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  const auto scalars = [&](const char* name, const std::vector<double>& f) {
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : f) out << fmt(v) << '\n';
  };
  scalars("u", s.u);
  scalars("v", s.v);
  scalars("w", t.w);
  scalars("z", t.z);
}

}  // namespace ks
