#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "ks/fem.hpp"
#include "ks/mesh.hpp"
#include "oracle.hpp"

namespace {

ks::Mesh unit_right_triangle() {
  const auto path =
      std::filesystem::temp_directory_path() / "unit_right.msh";
  std::ofstream out(path);
  out << "nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\n";
  out.close();
  return ks::load_mesh(path.string());
}

double edge_coupling(const ks::Mesh& mesh, const ks::StiffnessMatrix& K,
                     int i, int j) {
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    if ((mesh.edges[e][0] == i && mesh.edges[e][1] == j) ||
        (mesh.edges[e][0] == j && mesh.edges[e][1] == i)) {
      return K.offdiag[e];
    }
  }
  REQUIRE(false);
  return 0.0;
}

// Integral of x^a y^b over the triangle (0,0),(1,0),(0,1).
double monomial_integral(int a, int b) {
  double num = 1.0, den = 1.0;
  for (int k = 2; k <= a; ++k) num *= k;
  for (int k = 2; k <= b; ++k) num *= k;
  for (int k = 2; k <= a + b + 2; ++k) den *= k;
  return num / den;
}

}  // namespace

TEST_CASE("stiffness entries of the unit right triangle are exact") {
  const ks::Mesh mesh = unit_right_triangle();
  const ks::StiffnessMatrix K = ks::assemble_stiffness(mesh);
  CHECK(K.diag[0] == 1.0);
  CHECK(K.diag[1] == 0.5);
  CHECK(K.diag[2] == 0.5);
  CHECK(edge_coupling(mesh, K, 0, 1) == -0.5);
  CHECK(edge_coupling(mesh, K, 0, 2) == -0.5);
  CHECK(edge_coupling(mesh, K, 1, 2) == 0.0);
}

TEST_CASE("stiffness assembly matches the brute-force oracle") {
  const ks::Mesh meshes[] = {
      ks::build_structured_mesh(3),
      ks::build_structured_mesh(3, {0, 0, 2, 1}),
  };
  for (const ks::Mesh& mesh : meshes) {
    const ks::StiffnessMatrix K = ks::assemble_stiffness(mesh);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      CHECK(K.diag[i] ==
            doctest::Approx(oracle::stiffness_entry(mesh, i, i))
                .epsilon(1e-13));
    }
    for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
      const int i = mesh.edges[e][0], j = mesh.edges[e][1];
      CHECK(K.offdiag[e] ==
            doctest::Approx(oracle::stiffness_entry(mesh, i, j))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("lumped mass of the 1x1 grid and oracle cross-check") {
  const ks::Mesh mesh = ks::build_structured_mesh(1);
  const ks::LumpedMass M = ks::assemble_lumped_mass(mesh);
  CHECK(M.m[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(M.m[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-16));
  CHECK(M.m[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-16));
  CHECK(M.m[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(M.domain_area == doctest::Approx(1.0).epsilon(1e-15));

  const ks::Mesh fine = ks::build_structured_mesh(5, {0, 0, 3, 2});
  const ks::LumpedMass Mf = ks::assemble_lumped_mass(fine);
  for (int i = 0; i < fine.num_nodes(); ++i) {
    CHECK(Mf.m[i] ==
          doctest::Approx(oracle::mass_entry(fine, i)).epsilon(1e-14));
    CHECK(Mf.m[i] > 0.0);
  }
}

TEST_CASE("lumped inner product") {
  const ks::Mesh mesh = ks::build_structured_mesh(1);
  const ks::LumpedMass M = ks::assemble_lumped_mass(mesh);
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> ones{1, 1, 1, 1};
  CHECK(ks::inner_h(x, ones, M) == doctest::Approx(2.5).epsilon(1e-15));
  const std::vector<double> bad{1, 2};
  CHECK_THROWS_AS(ks::inner_h(bad, ones, M), std::invalid_argument);
}

TEST_CASE("stiffness application and quadratic form") {
  const ks::Mesh mesh = ks::build_structured_mesh(3);
  const ks::StiffnessMatrix K = ks::assemble_stiffness(mesh);

  const std::vector<double> c(mesh.num_nodes(), 3.7);
  for (double yi : ks::apply_stiffness(mesh, K, c)) CHECK(yi == 0.0);

  std::vector<double> x(mesh.num_nodes()), y(mesh.num_nodes());
  oracle::Rng rng(7);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    x[i] = rng.next();
    y[i] = rng.next();
  }
  const std::vector<double> Kx = ks::apply_stiffness(mesh, K, x);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double ref = oracle::stiffness_entry(mesh, i, i) * x[i];
    for (int j : mesh.node_patch[i]) {
      if (j != i) ref += oracle::stiffness_entry(mesh, i, j) * x[j];
    }
    CHECK(Kx[i] == doctest::Approx(ref).epsilon(1e-11));
  }

  double ref_xky = 0.0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    ref_xky += x[i] * oracle::stiffness_entry(mesh, i, i) * y[i];
    for (int j : mesh.node_patch[i]) {
      if (j != i) ref_xky += x[i] * oracle::stiffness_entry(mesh, i, j) * y[j];
    }
  }
  CHECK(ks::stiffness_product(mesh, K, x, y) ==
        doctest::Approx(ref_xky).epsilon(1e-11));

  // For an affine field the quadratic form is the exact Dirichlet energy.
  std::vector<double> aff(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    aff[i] = 0.2 + 1.5 * mesh.nodes[i].x - 0.75 * mesh.nodes[i].y;
  }
  CHECK(ks::stiffness_product(mesh, K, aff, aff) ==
        doctest::Approx(1.5 * 1.5 + 0.75 * 0.75).epsilon(1e-13));

  CHECK(ks::max_abs_row_sum(mesh, K) <= 1e-13);
}

TEST_CASE("quadrature of the averaging interpolation is exact to degree 5") {
  const ks::Mesh mesh = unit_right_triangle();
  const std::vector<int> assoc{0, 0, 0};
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      const std::vector<double> avg = ks::interp_average(
          [&](ks::Vec2 p) { return std::pow(p.x, a) * std::pow(p.y, b); },
          mesh, assoc);
      const double exact = monomial_integral(a, b) / 0.5;
      CHECK(avg[0] == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  // Degree 6 must show an error: the rule has teeth.
  const std::vector<double> x6 = ks::interp_average(
      [](ks::Vec2 p) { return std::pow(p.x, 6.0); }, mesh, assoc);
  CHECK(std::abs(x6[0] - monomial_integral(6, 0) / 0.5) > 1e-8);
}

TEST_CASE("averaging interpolation reproduces affine data and keeps bounds") {
  const ks::Mesh mesh = ks::build_structured_mesh(4);
  const std::vector<int> assoc = ks::default_triangle_assoc(mesh);

  const std::vector<double> aff = ks::interp_average(
      [](ks::Vec2 p) { return 0.3 + 0.8 * p.x - 0.4 * p.y; }, mesh, assoc);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const int t = assoc[i];
    const ks::Vec2 c = (1.0 / 3.0) * (mesh.nodes[mesh.triangles[t][0]] +
                                      mesh.nodes[mesh.triangles[t][1]] +
                                      mesh.nodes[mesh.triangles[t][2]]);
    CHECK(aff[i] ==
          doctest::Approx(0.3 + 0.8 * c.x - 0.4 * c.y).epsilon(1e-14));
  }

  const auto steep = [](ks::Vec2 p) {
    return 0.5 + 0.5 * std::tanh(40.0 * (p.x - 0.5));
  };
  const std::vector<double> s = ks::interp_average(steep, mesh, assoc);
  for (double si : s) {
    CHECK(si >= 0.0);
    CHECK(si <= 1.0);
  }

  // Agreement with a subdivided reference average; the centroid-rule
  // reference itself converges like 4^-depth, so ~1e-6 is its floor here.
  const auto smooth = [](ks::Vec2 p) {
    return std::exp(-p.x) * std::cos(2.0 * p.y);
  };
  const std::vector<double> q = ks::interp_average(smooth, mesh, assoc);
  for (int i : {0, 7, 12, 24}) {
    const int t = assoc[i];
    const double ref = oracle::subdivided_average(
        smooth, mesh.nodes[mesh.triangles[t][0]],
        mesh.nodes[mesh.triangles[t][1]], mesh.nodes[mesh.triangles[t][2]],
        6);
    CHECK(q[i] == doctest::Approx(ref).epsilon(2e-5));
  }
}

TEST_CASE("default triangle association picks an incident triangle") {
  const ks::Mesh mesh = ks::build_structured_mesh(3);
  const std::vector<int> assoc = ks::default_triangle_assoc(mesh);
  REQUIRE(assoc.size() == static_cast<std::size_t>(mesh.num_nodes()));
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    bool member = false;
    for (int a = 0; a < 3; ++a) {
      if (mesh.triangles[assoc[i]][a] == i) member = true;
    }
    CHECK(member);
  }
}

TEST_CASE("nodal interpolation and P1 point evaluation") {
  const ks::Mesh mesh = ks::build_structured_mesh(2);
  const auto f = [](ks::Vec2 p) { return 1.0 + 2.0 * p.x + 3.0 * p.y; };
  const std::vector<double> x = ks::interp_nodal(f, mesh);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    CHECK(x[i] == f(mesh.nodes[i]));
  }

  // P1 evaluation of affine nodal data is exact everywhere in the domain.
  CHECK(ks::eval_p1(mesh, x, {0.3, 0.2}) ==
        doctest::Approx(f({0.3, 0.2})).epsilon(1e-14));
  CHECK(ks::eval_p1(mesh, x, {0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(ks::eval_p1(mesh, x, {1.0, 1.0}) ==
        doctest::Approx(6.0).epsilon(1e-14));
  CHECK_THROWS_AS(ks::eval_p1(mesh, x, {1.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ks::eval_p1(mesh, x, {-0.1, 0.5}), std::invalid_argument);
}
