#include "ks/run.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ks/diagnostics.hpp"
#include "ks/output.hpp"
#include "ks/timeloop.hpp"

namespace ks {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct InvariantCheck {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<InvariantCheck> check_invariants(const Trajectory& traj,
                                             double dt_max) {
  const auto& rec = traj.records;
  const DiagnosticsRecord& first = rec.front();
  std::vector<InvariantCheck> checks;

  double min_u = first.min_u;
  double min_v = first.min_v;
  double max_v = first.max_v;
  double mass_drift = 0.0;
  double l1_v_rise = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    min_u = std::min(min_u, rec[k].min_u);
    min_v = std::min(min_v, rec[k].min_v);
    max_v = std::max(max_v, rec[k].max_v);
    mass_drift = std::max(mass_drift, std::abs(rec[k].mass_u - first.mass_u));
    if (k > 0) {
      l1_v_rise = std::max(l1_v_rise, rec[k].l1_v - rec[k - 1].l1_v);
    }
  }

  checks.push_back({"u >= 0", min_u >= 0.0, "min u = " + fmt(min_u)});
  checks.push_back({"0 < v <= max v(0)",
                    min_v > 0.0 && max_v <= traj.v_max_bound,
                    "v in [" + fmt(min_v) + ", " + fmt(max_v) + "], bound " +
                        fmt(traj.v_max_bound)});

  const double mass_tol = 1e-9 * std::max(1.0, std::abs(first.mass_u));
  checks.push_back({"mass of u conserved", mass_drift <= mass_tol,
                    "drift " + fmt(mass_drift) + ", tol " + fmt(mass_tol)});

  const double l1_tol = 1e-12 * std::max(1.0, first.l1_v);
  checks.push_back({"integral of v nonincreasing", l1_v_rise <= l1_tol,
                    "max rise " + fmt(l1_v_rise) + ", tol " + fmt(l1_tol)});

  const double t_end = rec.back().t;
  const double tol_e = default_tol_energy(dt_max, t_end, first.mass_u);
  const double res_v = check_energy_v(rec);
  const double res_w = check_energy_w(rec);
  const double res_z = check_energy_z(rec);
  checks.push_back({"signal energy inequality", res_v <= tol_e,
                    "residual " + fmt(res_v) + ", tol " + fmt(tol_e)});
  checks.push_back({"log-signal growth inequality", res_w <= tol_e,
                    "residual " + fmt(res_w) + ", tol " + fmt(tol_e)});
  checks.push_back({"log-density gradient inequality", res_z <= 1e-12,
                    "residual " + fmt(res_z)});
  checks.push_back({"initial log-signal bound finite",
                    std::isfinite(first.w_l1), "w integral = " +
                        fmt(first.w_l1)});
  return checks;
}

}  // namespace

int run_simulation(const SimulationConfig& cfg, std::ostream& log) {
  Mesh mesh;
  StiffnessMatrix K;
  LumpedMass M;
  SymmetricStencil stencil;
  State s0;
  try {
    mesh = build_mesh(cfg.mesh);
    K = assemble_stiffness(mesh);
    M = assemble_lumped_mass(mesh);
    const AcutenessReport rep =
        check_weak_acuteness(mesh, K, cfg.scheme.tol_acute);
    if (!rep.pass) {
      log << "error: mesh is not weakly acute (worst off-diagonal coupling "
          << fmt(rep.worst) << ", " << rep.violations.size()
          << " positive entries)\n";
      for (std::size_t k = 0; k < rep.violations.size() && k < 5; ++k) {
        const auto& v = rep.violations[k];
        log << "  edge (" << v.i << ", " << v.j << "): " << fmt(v.coupling)
            << "\n";
      }
      return kExitConfigError;
    }
    stencil = compute_symmetric_stencils(mesh);
    s0 = make_initial_state(cfg, mesh, M);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  log << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_triangles()
      << " triangles, h = " << fmt(mesh.h) << ", rho = " << fmt(mesh.rho)
      << "\n";

  const System sys{mesh, K, M, stencil, cfg.scheme};
  Trajectory traj;
  try {
    traj = advance(s0, cfg.step, sys, cfg.output.every);
  } catch (const StepFailure& e) {
    log << "step failure: " << e.what() << "\n";
    return kExitStepFailure;
  }

  log << "steps: " << traj.stats.accepted << " accepted, "
      << traj.stats.rejected << " rejected, smallest dt "
      << fmt(traj.stats.min_dt_used) << "\n";
  log << "final t = " << fmt(traj.final_state.t) << "\n";

  std::string dir = cfg.output.dir;
  if (const char* env = std::getenv("KS_OUT_DIR"); env && *env) dir = env;
  try {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_diagnostics_csv((fs::path(dir) / "diagnostics.csv").string(),
                          traj.records);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "fields_%04zu", k);
      const bool csv = cfg.output.format == OutputSpec::Format::Csv;
      const fs::path p = fs::path(dir) / (std::string(name) +
                                          (csv ? ".csv" : ".vtk"));
      if (csv) {
        write_fields_csv(p.string(), mesh, traj.snapshots[k],
                         traj.v_max_bound);
      } else {
        write_fields_vtk(p.string(), mesh, traj.snapshots[k],
                         traj.v_max_bound);
      }
    }
    std::ofstream cfg_out((fs::path(dir) / "config.txt").string());
    cfg_out << serialize_config(cfg);
    log << "wrote " << traj.snapshots.size() << " snapshots to " << dir
        << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const std::vector<InvariantCheck> checks =
      check_invariants(traj, cfg.step.dt_max);
  int failures = 0;
  for (const InvariantCheck& c : checks) {
    log << "invariant " << c.name << ": " << (c.pass ? "pass" : "FAIL")
        << " (" << c.detail << ")\n";
    if (!c.pass) failures += 1;
  }
  if (failures > 0) {
    log << "result: " << failures << " invariant check(s) failed\n";
    return kExitInvariantFailure;
  }
  log << "result: all invariant checks hold\n";
  return kExitOk;
}

}  // namespace ks
