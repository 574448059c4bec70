#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fvstag/mesh.hpp"
#include "fvstag/types.hpp"

namespace fvstag::testing {

inline Mesh unit_mesh(int n, bool periodic, double jitter = 0.0, std::uint64_t seed = 1) {
  StructuredMeshOptions o;
  o.nx = o.ny = n;
  o.domain = Rect{0.0, 1.0, 0.0, 1.0};
  o.periodic_x = o.periodic_y = periodic;
  o.jitter = jitter;
  o.seed = seed;
  return generate_structured_triangulation(o);
}

inline Mesh single_triangle(Vec3 a, Vec3 b, Vec3 c) {
  RawMesh raw;
  raw.nodes = {a, b, c};
  raw.triangles = {{0, 1, 2}};
  return Mesh::from_raw(raw);
}

// Hand-rolled P1 element: gradients of the barycentric hat functions from the
// vertex coordinates alone.
struct P1Triangle {
  double area = 0.0;
  Vec3 grad[3];

  explicit P1Triangle(const Vec3 (&x)[3]) {
    const double det = (x[1].x - x[0].x) * (x[2].y - x[0].y) - (x[2].x - x[0].x) * (x[1].y - x[0].y);
    area = 0.5 * det;
    for (int k = 0; k < 3; ++k) {
      const Vec3& b = x[(k + 1) % 3];
      const Vec3& c = x[(k + 2) % 3];
      grad[k] = {(b.y - c.y) / det, (c.x - b.x) / det, 0.0};
    }
  }
};

inline P1Triangle p1_of_cell(const Mesh& mesh, int c) {
  const auto& t = mesh.triangles()[c];
  const Vec3 x[3] = {mesh.nodes()[t[0]], mesh.nodes()[t[1]], mesh.nodes()[t[2]]};
  return P1Triangle(x);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace fvstag::testing
