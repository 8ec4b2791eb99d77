#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ks/fem.hpp"
#include "ks/mesh.hpp"
#include "ks/scheme.hpp"
#include "ks/timeloop.hpp"

namespace ks {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_ = 0)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg
                                     : msg),
        line(line_) {}
  int line;
};

struct MeshSpec {
  enum class Kind { Structured, File };
  Kind kind = Kind::Structured;
  int n = 16;
  Rect rect;         // structured only
  std::string path;  // file only
};

// Initial-datum presets. eval() is the continuous function fed to the
// averaging interpolation; sup() bounds it from above on the domain.
struct UPreset {
  enum class Kind { Constant, Gaussian, TwoBump };
  Kind kind = Kind::Constant;
  // constant: p[0] = value
  // gaussian: p[0] = amplitude, p[1] = width, p[2,3] = center
  // two_bump: p[0..3] first bump as gaussian, p[4..7] second bump
  double p[8] = {0, 0, 0, 0, 0, 0, 0, 0};

  double eval(Vec2 x) const;
  double sup() const;
};

struct VPreset {
  enum class Kind { Constant, Affine };
  Kind kind = Kind::Constant;
  // constant: p[0] = value (> 0)
  // affine: value = p[0] + p[1]*x + p[2]*y (must stay > 0 on the domain)
  double p[3] = {0, 0, 0};

  double eval(Vec2 x) const;
};

struct OutputSpec {
  enum class Format { Csv, Vtk };
  double every = 0.0;  // snapshot interval; 0 = initial and final only
  Format format = Format::Csv;
  std::string dir = "out";
};

struct SimulationConfig {
  MeshSpec mesh;
  UPreset u0;
  VPreset v0;
  std::optional<double> u_mass;  // rescale u0 to this total lumped mass
  SchemeParams scheme;
  StepControl step;
  OutputSpec output;
};

// Flat key = value format grouped in [mesh], [initial], [scheme], [time] and
// [output] sections; '#' starts a comment. Unknown sections or keys and
// malformed values are errors carrying the line number. Missing optional
// keys take the documented defaults; [initial] u, v and [time] t_end are
// required.
SimulationConfig parse_config(const std::string& text);
SimulationConfig parse_config_file(const std::string& path);
std::string serialize_config(const SimulationConfig& cfg);

Mesh build_mesh(const MeshSpec& spec);

// Averaged interpolation of the presets: u0 >= 0 and 0 < v0 <= sup of the
// preset, both enforced; applies the optional mass rescaling of u0. Throws
// ConfigError when a preset violates its bounds on this mesh.
State make_initial_state(const SimulationConfig& cfg, const Mesh& mesh,
                         const LumpedMass& M);

}  // namespace ks
