#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fvstag/mesh.hpp"
#include "support.hpp"

using namespace fvstag;
using fvstag::testing::single_triangle;
using fvstag::testing::unit_mesh;

TEST_CASE("reference triangle corner vectors and area") {
  const Mesh m = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  CHECK(m.cell_area()[0] == doctest::Approx(0.5).epsilon(1e-15));
  const Vec3 n0 = m.corner_normal(0, 0);
  CHECK(n0.x == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(n0.y == doctest::Approx(-0.5).epsilon(1e-15));
  // vertex (1,0): half of side (0,0)-(1,0) gives (0,-1/2), half of the hypotenuse (1/2,1/2)
  const Vec3 n1 = m.corner_normal(0, 1);
  CHECK(n1.x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n1.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("equilateral corner vectors close and obey the triangle inequality") {
  const Mesh m = single_triangle({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0});
  Vec3 sum;
  for (int k = 0; k < 3; ++k) {
    sum += m.corner_normal(0, k);
    // |l_pc n_pc| <= l+ + l- = half of each adjacent side, sides have length 1
    CHECK(norm(m.corner_normal(0, k)) <= 1.0 + 1e-15);
  }
  CHECK(norm(sum) < 1e-15);
}

TEST_CASE("3x3 lattice on the unit square") {
  const Mesh m = unit_mesh(3, false);
  CHECK(m.num_nodes() == 9);
  CHECK(m.num_cells() == 8);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  double dual = 0.0;
  for (std::size_t u = 0; u < m.num_unique_nodes(); ++u) dual += m.dual_area_unique(static_cast<int>(u));
  CHECK(dual == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("periodic 20x20 mesh: corner vectors around every node sum to zero") {
  StructuredMeshOptions o;
  o.nx = o.ny = 20;
  o.domain = Rect{0, 2 * std::numbers::pi, 0, 2 * std::numbers::pi};
  o.periodic_x = o.periodic_y = true;
  const Mesh m = generate_structured_triangulation(o);
  CHECK(m.fully_periodic());
  CHECK(m.num_unique_nodes() == 19 * 19);
  double worst = 0.0;
  for (std::size_t u = 0; u < m.num_unique_nodes(); ++u) {
    Vec3 s;
    for (const Corner& k : m.node_cells(static_cast<int>(u))) s -= m.corner_normal(k.cell, k.local);
    worst = std::max(worst, norm(s));
  }
  CHECK(worst <= 1e-13);
  const GeometryReport g = validate_geometry(m);
  CHECK(g.ok());
  CHECK(g.area_partition <= 1e-12);
}

TEST_CASE("boundary nodes close with their boundary corner vector") {
  for (double jitter : {0.0, 0.25}) {
    const Mesh m = unit_mesh(9, false, jitter, 5);
    REQUIRE_FALSE(m.boundary_uniques().empty());
    double worst = 0.0;
    for (int u : m.boundary_uniques()) {
      Vec3 s;
      for (const Corner& k : m.node_cells(u)) s += m.corner_normal(k.cell, k.local);
      worst = std::max(worst, norm(s - m.boundary_corner_unique(u)));
    }
    CHECK(worst <= 1e-13);
    // a boundary corner of the square has l_pb n_pb = -(h/2)(1, 1) up to jitter
    CHECK(validate_geometry(m).ok());
  }
}

TEST_CASE("every cell: corner vectors sum to zero relative to the perimeter") {
  const Mesh m = unit_mesh(12, true, 0.3, 9);
  const GeometryReport g = validate_geometry(m);
  CHECK(g.cell_gauss <= 1e-13);
  CHECK(g.node_gauss <= 1e-13);
  CHECK(g.min_cell_area > 0.0);
}

TEST_CASE("clockwise triangle is repaired and reported") {
  RawMesh raw;
  raw.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  raw.triangles = {{0, 1, 2}, {1, 2, 3}};  // second one is clockwise
  const Mesh m = Mesh::from_raw(raw);
  CHECK(m.reoriented_cells() == 1);
  CHECK(validate_geometry(m).flipped_cells == 1);
  for (double a : m.cell_area()) CHECK(a > 0.0);
}

TEST_CASE("degenerate input is rejected") {
  RawMesh raw;
  raw.nodes = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  raw.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(Mesh::from_raw(raw), GeometryError);

  StructuredMeshOptions o;
  o.nx = o.ny = 4;
  o.jitter = 0.5;
  CHECK_THROWS_AS(generate_structured_triangulation(o), ConfigError);
}

TEST_CASE("dual cells partition the sub-cells") {
  const Mesh m = unit_mesh(7, true, 0.2, 3);
  const GeometryReport g = validate_geometry(m);
  CHECK(g.dual_partition <= 1e-14);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += m.subcell_area(static_cast<int>(c), k);
    CHECK(s == doctest::Approx(m.cell_area()[c]).epsilon(1e-13));
  }
}

TEST_CASE("jitter is reproducible from the seed") {
  const Mesh a = unit_mesh(6, true, 0.2, 42);
  const Mesh b = unit_mesh(6, true, 0.2, 42);
  const Mesh c = unit_mesh(6, true, 0.2, 43);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.num_nodes(); ++i) {
    same = same && a.nodes()[i].x == b.nodes()[i].x && a.nodes()[i].y == b.nodes()[i].y;
    differs = differs || a.nodes()[i].x != c.nodes()[i].x;
  }
  CHECK(same);
  CHECK(differs);
}
