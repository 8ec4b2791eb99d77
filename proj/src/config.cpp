#include "ks/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ks {

double UPreset::eval(Vec2 x) const {
  const auto gauss = [](const double* q, Vec2 pt) {
    const double dx = pt.x - q[2], dy = pt.y - q[3];
    return q[0] * std::exp(-(dx * dx + dy * dy) / (2.0 * q[1] * q[1]));
  };
  switch (kind) {
    case Kind::Constant: return p[0];
    case Kind::Gaussian: return gauss(p, x);
    case Kind::TwoBump: return gauss(p, x) + gauss(p + 4, x);
  }
  return 0.0;
}

double UPreset::sup() const {
  switch (kind) {
    case Kind::Constant: return p[0];
    case Kind::Gaussian: return p[0];
    case Kind::TwoBump: return p[0] + p[4];
  }
  return 0.0;
}

double VPreset::eval(Vec2 x) const {
  switch (kind) {
    case Kind::Constant: return p[0];
    case Kind::Affine: return p[0] + p[1] * x.x + p[2] * x.y;
  }
  return 0.0;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'", line);
  }
}

int parse_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'", line);
  }
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

UPreset parse_u_preset(const std::string& value, int line) {
  const std::vector<std::string> toks = split_tokens(value);
  if (toks.empty()) throw ConfigError("empty value for initial u", line);
  UPreset u;
  const auto need = [&](std::size_t params) {
    if (toks.size() != params + 1) {
      throw ConfigError("initial u preset '" + toks[0] + "' takes " +
                            std::to_string(params) + " parameters",
                        line);
    }
    for (std::size_t k = 0; k < params; ++k) {
      u.p[k] = parse_double(toks[k + 1], line);
    }
  };
  if (toks[0] == "constant") {
    u.kind = UPreset::Kind::Constant;
    need(1);
    if (!(u.p[0] >= 0.0)) {
      throw ConfigError("initial u must be >= 0", line);
    }
  } else if (toks[0] == "gaussian") {
    u.kind = UPreset::Kind::Gaussian;
    need(4);
    if (!(u.p[0] >= 0.0) || !(u.p[1] > 0.0)) {
      throw ConfigError("gaussian needs amplitude >= 0 and width > 0", line);
    }
  } else if (toks[0] == "two_bump") {
    u.kind = UPreset::Kind::TwoBump;
    need(8);
    if (!(u.p[0] >= 0.0) || !(u.p[1] > 0.0) || !(u.p[4] >= 0.0) ||
        !(u.p[5] > 0.0)) {
      throw ConfigError("two_bump needs amplitudes >= 0 and widths > 0", line);
    }
  } else {
    throw ConfigError("unknown initial u preset '" + toks[0] + "'", line);
  }
  return u;
}

VPreset parse_v_preset(const std::string& value, int line) {
  const std::vector<std::string> toks = split_tokens(value);
  if (toks.empty()) throw ConfigError("empty value for initial v", line);
  VPreset v;
  const auto need = [&](std::size_t params) {
    if (toks.size() != params + 1) {
      throw ConfigError("initial v preset '" + toks[0] + "' takes " +
                            std::to_string(params) + " parameters",
                        line);
    }
    for (std::size_t k = 0; k < params; ++k) {
      v.p[k] = parse_double(toks[k + 1], line);
    }
  };
  if (toks[0] == "constant") {
    v.kind = VPreset::Kind::Constant;
    need(1);
    if (!(v.p[0] > 0.0)) {
      throw ConfigError("initial v must be > 0", line);
    }
  } else if (toks[0] == "affine") {
    v.kind = VPreset::Kind::Affine;
    need(3);
  } else {
    throw ConfigError("unknown initial v preset '" + toks[0] + "'", line);
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SimulationConfig parse_config(const std::string& text) {
  SimulationConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool have_u = false, have_v = false, have_t_end = false;
  bool have_dt_init = false, mesh_grid_keys = false;

  while (std::getline(in, raw)) {
    line += 1;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("malformed section header '" + s + "'", line);
      }
      section = trim(s.substr(1, s.size() - 2));
      if (section != "mesh" && section != "initial" && section != "scheme" &&
          section != "time" && section != "output") {
        throw ConfigError("unknown section [" + section + "]", line);
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value', got '" + s + "'", line);
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    if (value.empty()) {
      throw ConfigError("missing value for key '" + key + "'", line);
    }
    if (section.empty()) {
      throw ConfigError("key '" + key + "' appears outside any section", line);
    }

    if (section == "mesh") {
      if (key == "kind") {
        if (value == "structured") {
          cfg.mesh.kind = MeshSpec::Kind::Structured;
        } else if (value == "file") {
          cfg.mesh.kind = MeshSpec::Kind::File;
        } else {
          throw ConfigError("unknown mesh kind '" + value + "'", line);
        }
      } else if (key == "n") {
        cfg.mesh.n = parse_int(value, line);
        if (cfg.mesh.n < 1) throw ConfigError("mesh n must be >= 1", line);
        mesh_grid_keys = true;
      } else if (key == "x0") {
        cfg.mesh.rect.x0 = parse_double(value, line);
        mesh_grid_keys = true;
      } else if (key == "y0") {
        cfg.mesh.rect.y0 = parse_double(value, line);
        mesh_grid_keys = true;
      } else if (key == "x1") {
        cfg.mesh.rect.x1 = parse_double(value, line);
        mesh_grid_keys = true;
      } else if (key == "y1") {
        cfg.mesh.rect.y1 = parse_double(value, line);
        mesh_grid_keys = true;
      } else if (key == "path") {
        cfg.mesh.path = value;
      } else {
        throw ConfigError("unknown key '" + key + "' in [mesh]", line);
      }
    } else if (section == "initial") {
      if (key == "u") {
        cfg.u0 = parse_u_preset(value, line);
        have_u = true;
      } else if (key == "v") {
        cfg.v0 = parse_v_preset(value, line);
        have_v = true;
      } else if (key == "u_mass") {
        const double m = parse_double(value, line);
        if (!(m > 0.0)) throw ConfigError("u_mass must be > 0", line);
        cfg.u_mass = m;
      } else {
        throw ConfigError("unknown key '" + key + "' in [initial]", line);
      }
    } else if (section == "scheme") {
      if (key == "chi") {
        cfg.scheme.chi = parse_double(value, line);
      } else if (key == "q_detector") {
        cfg.scheme.q_detector = parse_double(value, line);
      } else if (key == "eps_equal") {
        cfg.scheme.eps_equal = parse_double(value, line);
      } else if (key == "tol_acute") {
        cfg.scheme.tol_acute = parse_double(value, line);
      } else if (key == "series_switch") {
        cfg.scheme.series_switch = parse_double(value, line);
      } else {
        throw ConfigError("unknown key '" + key + "' in [scheme]", line);
      }
    } else if (section == "time") {
      if (key == "t_end") {
        cfg.step.t_end = parse_double(value, line);
        have_t_end = true;
      } else if (key == "dt_init") {
        cfg.step.dt_init = parse_double(value, line);
        have_dt_init = true;
      } else if (key == "dt_min") {
        cfg.step.dt_min = parse_double(value, line);
      } else if (key == "dt_max") {
        cfg.step.dt_max = parse_double(value, line);
      } else if (key == "growth") {
        cfg.step.growth = parse_double(value, line);
      } else if (key == "shrink") {
        cfg.step.shrink = parse_double(value, line);
      } else if (key == "bound_tol") {
        cfg.step.bound_tol = parse_double(value, line);
      } else if (key == "max_rejects") {
        cfg.step.max_rejects = parse_int(value, line);
      } else {
        throw ConfigError("unknown key '" + key + "' in [time]", line);
      }
    } else {  // output
      if (key == "every") {
        cfg.output.every = parse_double(value, line);
        if (!(cfg.output.every >= 0.0)) {
          throw ConfigError("output every must be >= 0", line);
        }
      } else if (key == "format") {
        if (value == "csv") {
          cfg.output.format = OutputSpec::Format::Csv;
        } else if (value == "vtk") {
          cfg.output.format = OutputSpec::Format::Vtk;
        } else {
          throw ConfigError("unknown output format '" + value + "'", line);
        }
      } else if (key == "dir") {
        cfg.output.dir = value;
      } else {
        throw ConfigError("unknown key '" + key + "' in [output]", line);
      }
    }
  }

  if (!have_u) throw ConfigError("missing required key u in [initial]");
  if (!have_v) throw ConfigError("missing required key v in [initial]");
  if (!have_t_end) throw ConfigError("missing required key t_end in [time]");
  if (!have_dt_init) cfg.step.dt_init = cfg.step.dt_max;

  if (cfg.mesh.kind == MeshSpec::Kind::File && cfg.mesh.path.empty()) {
    throw ConfigError("mesh kind 'file' requires a path");
  }
  if (cfg.mesh.kind == MeshSpec::Kind::File && mesh_grid_keys) {
    throw ConfigError("grid keys (n, x0..y1) are only valid for kind "
                      "'structured'");
  }
  if (cfg.mesh.kind == MeshSpec::Kind::Structured && !cfg.mesh.path.empty()) {
    throw ConfigError("path is only valid for mesh kind 'file'");
  }
  if (!(cfg.mesh.rect.x1 > cfg.mesh.rect.x0) ||
      !(cfg.mesh.rect.y1 > cfg.mesh.rect.y0)) {
    throw ConfigError("mesh rectangle must satisfy x1 > x0 and y1 > y0");
  }

  try {
    cfg.scheme.validate();
    cfg.step.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimulationConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const SimulationConfig& cfg) {
  std::ostringstream out;
  out << "[mesh]\n";
  if (cfg.mesh.kind == MeshSpec::Kind::Structured) {
    out << "kind = structured\n";
    out << "n = " << cfg.mesh.n << "\n";
    out << "x0 = " << fmt(cfg.mesh.rect.x0) << "\n";
    out << "y0 = " << fmt(cfg.mesh.rect.y0) << "\n";
    out << "x1 = " << fmt(cfg.mesh.rect.x1) << "\n";
    out << "y1 = " << fmt(cfg.mesh.rect.y1) << "\n";
  } else {
    out << "kind = file\n";
    out << "path = " << cfg.mesh.path << "\n";
  }

  out << "\n[initial]\n";
  out << "u = ";
  switch (cfg.u0.kind) {
    case UPreset::Kind::Constant:
      out << "constant " << fmt(cfg.u0.p[0]);
      break;
    case UPreset::Kind::Gaussian:
      out << "gaussian";
      for (int k = 0; k < 4; ++k) out << " " << fmt(cfg.u0.p[k]);
      break;
    case UPreset::Kind::TwoBump:
      out << "two_bump";
      for (int k = 0; k < 8; ++k) out << " " << fmt(cfg.u0.p[k]);
      break;
  }
  out << "\nv = ";
  switch (cfg.v0.kind) {
    case VPreset::Kind::Constant:
      out << "constant " << fmt(cfg.v0.p[0]);
      break;
    case VPreset::Kind::Affine:
      out << "affine";
      for (int k = 0; k < 3; ++k) out << " " << fmt(cfg.v0.p[k]);
      break;
  }
  out << "\n";
  if (cfg.u_mass) out << "u_mass = " << fmt(*cfg.u_mass) << "\n";

  out << "\n[scheme]\n";
  out << "chi = " << fmt(cfg.scheme.chi) << "\n";
  out << "q_detector = " << fmt(cfg.scheme.q_detector) << "\n";
  out << "eps_equal = " << fmt(cfg.scheme.eps_equal) << "\n";
  out << "tol_acute = " << fmt(cfg.scheme.tol_acute) << "\n";
  out << "series_switch = " << fmt(cfg.scheme.series_switch) << "\n";

  out << "\n[time]\n";
  out << "t_end = " << fmt(cfg.step.t_end) << "\n";
  out << "dt_init = " << fmt(cfg.step.dt_init) << "\n";
  out << "dt_min = " << fmt(cfg.step.dt_min) << "\n";
  out << "dt_max = " << fmt(cfg.step.dt_max) << "\n";
  out << "growth = " << fmt(cfg.step.growth) << "\n";
  out << "shrink = " << fmt(cfg.step.shrink) << "\n";
  out << "bound_tol = " << fmt(cfg.step.bound_tol) << "\n";
  out << "max_rejects = " << cfg.step.max_rejects << "\n";

  out << "\n[output]\n";
  out << "every = " << fmt(cfg.output.every) << "\n";
  out << "format = "
      << (cfg.output.format == OutputSpec::Format::Csv ? "csv" : "vtk")
      << "\n";
  out << "dir = " << cfg.output.dir << "\n";
  return out.str();
}

Mesh build_mesh(const MeshSpec& spec) {
  if (spec.kind == MeshSpec::Kind::Structured) {
    return build_structured_mesh(spec.n, spec.rect);
  }
  return load_mesh(spec.path);
}

State make_initial_state(const SimulationConfig& cfg, const Mesh& mesh,
                         const LumpedMass& M) {
  const std::vector<int> assoc = default_triangle_assoc(mesh);
  std::vector<double> u = interp_average(
      [&](Vec2 x) { return cfg.u0.eval(x); }, mesh, assoc);
  std::vector<double> v = interp_average(
      [&](Vec2 x) { return cfg.v0.eval(x); }, mesh, assoc);

  // Nodal max of the preset bounds its averaged interpolant: the quadrature
  // weights are positive and affine data is reproduced exactly.
  double v_sup = 0.0;
  for (const Vec2& p : mesh.nodes) v_sup = std::max(v_sup, cfg.v0.eval(p));

  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) {
      throw ConfigError("initial u is negative at node " + std::to_string(i));
    }
    if (!(v[i] > 0.0)) {
      throw ConfigError("initial v is not positive at node " +
                        std::to_string(i));
    }
    if (v[i] > v_sup * (1.0 + 1e-12)) {
      throw ConfigError("initial v exceeds its preset bound at node " +
                        std::to_string(i));
    }
  }

  if (cfg.u_mass) {
    double mass0 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mass0 += M.m[i] * u[i];
    if (!(mass0 > 0.0)) {
      throw ConfigError("u_mass rescaling needs a nonzero initial mass");
    }
    const double scale = *cfg.u_mass / mass0;
    for (double& ui : u) ui *= scale;
  }

  State s;
  s.u = std::move(u);
  s.v = std::move(v);
  s.t = 0.0;
  return s;
}

}  // namespace ks
