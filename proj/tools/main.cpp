#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ks/config.hpp"
#include "ks/fem.hpp"
#include "ks/mesh.hpp"
#include "ks/run.hpp"

int run_self_test(std::ostream& os);

namespace {

int cmd_solve(const std::string& config_path) {
  ks::SimulationConfig cfg;
  try {
    cfg = ks::parse_config_file(config_path);
  } catch (const ks::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ks::kExitConfigError;
  }
  return ks::run_simulation(cfg, std::cout);
}

int cmd_check_mesh(const std::string& mesh_path, double tol) {
  ks::Mesh mesh;
  try {
    mesh = ks::load_mesh(mesh_path);
  } catch (const ks::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 1;
  }
  const ks::StiffnessMatrix K = ks::assemble_stiffness(mesh);
  std::cout << "mesh: " << mesh.num_nodes() << " nodes, "
            << mesh.num_triangles() << " triangles, h = " << mesh.h
            << ", rho = " << mesh.rho << "\n";
  const ks::AcutenessReport rep = ks::check_weak_acuteness(mesh, K, tol);
  if (rep.pass) {
    std::cout << "weakly acute: yes (worst off-diagonal coupling "
              << rep.worst << ")\n";
    return 0;
  }
  std::cout << "weakly acute: NO (worst off-diagonal coupling " << rep.worst
            << ", " << rep.violations.size() << " positive entries)\n";
  for (std::size_t k = 0; k < rep.violations.size() && k < 10; ++k) {
    const auto& v = rep.violations[k];
    std::cout << "  edge (" << v.i << ", " << v.j << "): " << v.coupling
              << "\n";
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite element solver for a chemotaxis system with "
               "logarithmic sensitivity and signal absorption"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* solve =
      app.add_subcommand("solve", "integrate the system given by a config");
  solve->add_option("config", config_path, "path to the config file")
      ->required();

  std::string mesh_path;
  double tol_acute = 1e-12;
  CLI::App* check = app.add_subcommand(
      "check-mesh", "verify a mesh file is conforming and weakly acute");
  check->add_option("mesh", mesh_path, "path to the mesh file")->required();
  check->add_option("--tol", tol_acute,
                    "tolerance on positive off-diagonal couplings");

  app.add_subcommand("self-test", "run built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (solve->parsed()) return cmd_solve(config_path);
  if (check->parsed()) return cmd_check_mesh(mesh_path, tol_acute);
  return run_self_test(std::cout) == 0 ? 0 : 3;
}
