#include "fvstag/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "fvstag/operators.hpp"

namespace fvstag {

NodeScalarField random_node_field(const Mesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  NodeScalarField f(mesh.num_nodes());
  std::span<double> out(&f[0], f.size());
  for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) mesh.scatter_unique(static_cast<int>(u), dist(rng), out);
  return f;
}

CellVectorField random_cell_field(const Mesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CellVectorField v(mesh.num_cells());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = {dist(rng), dist(rng), 0.0};
  return v;
}

namespace {

double max_abs(const NodeScalarField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double max_abs(const NodeVectorField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    m = std::max({m, std::abs(f[i].x), std::abs(f[i].y), std::abs(f[i].z)});
  return m;
}

}  // namespace

IdentityReport verify_operator_identities(const std::vector<int>& sizes, const std::vector<double>& jitters,
                                          int fields, int sbp_probes, std::uint64_t seed) {
  IdentityReport rep;
  std::uint64_t s = seed;
  for (int n : sizes) {
    for (double jit : jitters) {
      StructuredMeshOptions o;
      o.nx = o.ny = n;
      o.domain = Rect{0.0, 1.0, 0.0, 1.0};
      o.periodic_x = o.periodic_y = true;
      o.jitter = jit;
      o.seed = ++s;
      const Mesh mesh = generate_structured_triangulation(o);
      const double h = mesh.min_incircle_diameter();

      IdentityCase ic{n, jit};
      for (int k = 0; k < fields; ++k) {
        const NodeScalarField phi = random_node_field(mesh, ++s);
        const double scale = std::max(1.0, max_abs(phi) / (h * h));
        ic.curl_grad = std::max(ic.curl_grad, max_abs(curl_dual(gradient_primal(phi, mesh), mesh)) / scale);

        NodeVectorField j(mesh.num_nodes());
        for (std::size_t i = 0; i < j.size(); ++i) j[i] = {0.0, 0.0, phi[i]};
        ic.div_curl = std::max(ic.div_curl, max_abs(divergence_dual(curl_primal(j, mesh), mesh)) / scale);
      }

      const auto area = mesh.cell_area();
      for (int k = 0; k < sbp_probes; ++k) {
        const NodeScalarField phi = random_node_field(mesh, ++s);
        const CellVectorField v = random_cell_field(mesh, ++s);
        const CellVectorField g = gradient_primal(phi, mesh);
        const NodeScalarField d = divergence_dual(v, mesh);
        double cells = 0.0, vv = 0.0;
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
          cells += area[c] * dot(g[c], v[c]);
          vv += area[c] * dot(v[c], v[c]);
        }
        double nodes = 0.0, pp = 0.0;
        for (std::size_t u = 0; u < mesh.num_unique_nodes(); ++u) {
          const int p = mesh.unique_representative(static_cast<int>(u));
          const double w = mesh.dual_area_unique(static_cast<int>(u));
          nodes += w * phi[p] * d[p];
          pp += w * phi[p] * phi[p];
        }
        ic.sbp = std::max(ic.sbp, std::abs(cells + nodes) / std::sqrt(pp * vv));
      }
      rep.curl_grad = std::max(rep.curl_grad, ic.curl_grad);
      rep.div_curl = std::max(rep.div_curl, ic.div_curl);
      rep.sbp = std::max(rep.sbp, ic.sbp);
      rep.cases.push_back(ic);
    }
  }
  return rep;
}

std::string format_identity_report(const IdentityReport& r) {
  std::ostringstream o;
  char buf[160];
  o << "    n  jitter   curl(grad)    div(curl)          sbp\n";
  for (const auto& c : r.cases) {
    std::snprintf(buf, sizeof buf, "%5d  %6.2f  %11.3e  %11.3e  %11.3e\n", c.n, c.jitter, c.curl_grad, c.div_curl,
                  c.sbp);
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "  max          %11.3e  %11.3e  %11.3e\n", r.curl_grad, r.div_curl, r.sbp);
  o << buf;
  return o.str();
}

}  // namespace fvstag
