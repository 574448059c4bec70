#include "fvstag/operators.hpp"

#include "fvstag/parallel.hpp"

namespace fvstag {

namespace {

template <class T>
T zero_value() {
  return T{};
}
template <>
double zero_value<double>() {
  return 0.0;
}

// Sub-cell weighted average of a cell quantity around unique node u.
template <class T>
T fan_average(const std::vector<T>& cell_values, const Mesh& mesh, int u) {
  T s = zero_value<T>();
  for (const Corner& cr : mesh.node_cells(u)) {
    const double w = mesh.subcell_area(cr.cell, cr.local);
    T term = cell_values[cr.cell];
    term *= w;
    s += term;
  }
  s *= 1.0 / mesh.dual_area_unique(u);
  return s;
}

Vec3 boundary_value(const CellVectorField& v, const Mesh& mesh, int u, BoundaryClosure closure) {
  Vec3 vb = fan_average(v.values(), mesh, u);
  if (closure == BoundaryClosure::wall) {
    const Vec3& nb = mesh.boundary_corner_unique(u);
    const double len = norm(nb);
    if (len > 0.0) {
      const Vec3 n = (1.0 / len) * nb;
      vb -= dot(vb, n) * n;
    }
  }
  return vb;
}

template <class T>
void write_through(const Mesh& mesh, int u, const T& value, Field<Location::node, T>& out) {
  for (int p : mesh.unique_copies(u)) out[p] = value;
}

}  // namespace

CellVectorField gradient_primal(const NodeScalarField& phi, const Mesh& mesh) {
  CellVectorField g(mesh.num_cells());
  const auto& tris = mesh.triangles();
  const auto area = mesh.cell_area();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t c) {
    Vec3 s;
    for (int k = 0; k < 3; ++k) s += phi[tris[c][k]] * mesh.corner_normal(static_cast<int>(c), k);
    g[c] = (1.0 / area[c]) * s;
  });
  return g;
}

CellVectorField curl_primal(const NodeVectorField& j, const Mesh& mesh) {
  CellVectorField out(mesh.num_cells());
  const auto& tris = mesh.triangles();
  const auto area = mesh.cell_area();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t c) {
    Vec3 s;
    for (int k = 0; k < 3; ++k) s += cross(mesh.corner_normal(static_cast<int>(c), k), j[tris[c][k]]);
    out[c] = (1.0 / area[c]) * s;
  });
  return out;
}

CellTensorField gradient_primal_vector(const NodeVectorField& w, const Mesh& mesh) {
  CellTensorField out(mesh.num_cells());
  const auto& tris = mesh.triangles();
  const auto area = mesh.cell_area();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t c) {
    Mat3 s;
    for (int k = 0; k < 3; ++k) s += outer(w[tris[c][k]], mesh.corner_normal(static_cast<int>(c), k));
    s *= 1.0 / area[c];
    out[c] = s;
  });
  return out;
}

NodeScalarField divergence_dual(const CellVectorField& v, const Mesh& mesh, BoundaryClosure closure) {
  NodeScalarField out(mesh.num_nodes());
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_unique_nodes()), [&](std::ptrdiff_t ui) {
    const int u = static_cast<int>(ui);
    double s = 0.0;
    for (const Corner& cr : mesh.node_cells(u)) s -= dot(mesh.corner_normal(cr.cell, cr.local), v[cr.cell]);
    if (closure != BoundaryClosure::natural && mesh.is_boundary_unique(u))
      s += dot(mesh.boundary_corner_unique(u), boundary_value(v, mesh, u, closure));
    write_through(mesh, u, s / mesh.dual_area_unique(u), out);
  });
  return out;
}

NodeVectorField curl_dual(const CellVectorField& v, const Mesh& mesh, BoundaryClosure closure) {
  NodeVectorField out(mesh.num_nodes());
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_unique_nodes()), [&](std::ptrdiff_t ui) {
    const int u = static_cast<int>(ui);
    Vec3 s;
    for (const Corner& cr : mesh.node_cells(u)) s -= cross(mesh.corner_normal(cr.cell, cr.local), v[cr.cell]);
    if (closure != BoundaryClosure::natural && mesh.is_boundary_unique(u))
      s += cross(mesh.boundary_corner_unique(u), boundary_value(v, mesh, u, closure));
    write_through(mesh, u, (1.0 / mesh.dual_area_unique(u)) * s, out);
  });
  return out;
}

NodeTensorField gradient_dual(const CellVectorField& v, const Mesh& mesh, BoundaryClosure closure) {
  NodeTensorField out(mesh.num_nodes());
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_unique_nodes()), [&](std::ptrdiff_t ui) {
    const int u = static_cast<int>(ui);
    Mat3 s;
    for (const Corner& cr : mesh.node_cells(u)) s -= outer(v[cr.cell], mesh.corner_normal(cr.cell, cr.local));
    if (closure != BoundaryClosure::natural && mesh.is_boundary_unique(u))
      s += outer(boundary_value(v, mesh, u, closure), mesh.boundary_corner_unique(u));
    s *= 1.0 / mesh.dual_area_unique(u);
    write_through(mesh, u, s, out);
  });
  return out;
}

std::vector<NodeVectorField> curl_dual_rows(const CellTensorField& a, const Mesh& mesh, BoundaryClosure closure) {
  std::vector<NodeVectorField> rows;
  rows.reserve(3);
  for (int i = 0; i < 3; ++i) {
    CellVectorField r(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) r[c] = a[c].row(i);
    rows.push_back(curl_dual(r, mesh, closure));
  }
  return rows;
}

CellVectorField divergence_primal_tensor(const NodeTensorField& sigma, const Mesh& mesh) {
  CellVectorField out(mesh.num_cells());
  const auto& tris = mesh.triangles();
  const auto area = mesh.cell_area();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t c) {
    Vec3 s;
    for (int k = 0; k < 3; ++k) s += sigma[tris[c][k]] * mesh.corner_normal(static_cast<int>(c), k);
    out[c] = (1.0 / area[c]) * s;
  });
  return out;
}

namespace {

template <class T>
Field<Location::node, T> cell_to_node(const Field<Location::cell, T>& f, const Mesh& mesh) {
  Field<Location::node, T> out(mesh.num_nodes());
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_unique_nodes()), [&](std::ptrdiff_t ui) {
    const int u = static_cast<int>(ui);
    write_through(mesh, u, fan_average(f.values(), mesh, u), out);
  });
  return out;
}

template <class T>
Field<Location::cell, T> node_to_cell(const Field<Location::node, T>& g, const Mesh& mesh) {
  Field<Location::cell, T> out(mesh.num_cells());
  const auto& tris = mesh.triangles();
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_cells()), [&](std::ptrdiff_t c) {
    T s = g[tris[c][0]];
    s += g[tris[c][1]];
    s += g[tris[c][2]];
    s *= 1.0 / 3.0;
    out[c] = s;
  });
  return out;
}

}  // namespace

NodeScalarField average_cell_to_node(const CellScalarField& f, const Mesh& mesh) { return cell_to_node(f, mesh); }
NodeVectorField average_cell_to_node(const CellVectorField& f, const Mesh& mesh) { return cell_to_node(f, mesh); }
NodeTensorField average_cell_to_node(const CellTensorField& f, const Mesh& mesh) { return cell_to_node(f, mesh); }

CellScalarField average_node_to_cell(const NodeScalarField& g, const Mesh& mesh) { return node_to_cell(g, mesh); }
CellVectorField average_node_to_cell(const NodeVectorField& g, const Mesh& mesh) { return node_to_cell(g, mesh); }
CellTensorField average_node_to_cell(const NodeTensorField& g, const Mesh& mesh) { return node_to_cell(g, mesh); }

std::vector<double> gather_unique(const NodeScalarField& f, const Mesh& mesh) {
  std::vector<double> u(mesh.num_unique_nodes());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f[mesh.unique_representative(static_cast<int>(i))];
  return u;
}

NodeScalarField scatter_unique(const std::vector<double>& u, const Mesh& mesh) {
  NodeScalarField f(mesh.num_nodes());
  for (std::size_t p = 0; p < f.size(); ++p) f[p] = u[mesh.unique_index(static_cast<int>(p))];
  return f;
}

void apply_negative_laplacian(const Mesh& mesh, std::span<const double> p, std::span<double> y,
                              std::vector<Vec3>& scratch) {
  const auto nc = static_cast<std::ptrdiff_t>(mesh.num_cells());
  scratch.resize(mesh.num_cells());
  const auto area = mesh.cell_area();
  parallel_for(nc, [&](std::ptrdiff_t c) {
    const int ci = static_cast<int>(c);
    Vec3 s;
    for (int k = 0; k < 3; ++k) s += p[mesh.cell_unique(ci, k)] * mesh.corner_normal(ci, k);
    scratch[c] = (1.0 / area[c]) * s;
  });
  parallel_for(static_cast<std::ptrdiff_t>(mesh.num_unique_nodes()), [&](std::ptrdiff_t ui) {
    const int u = static_cast<int>(ui);
    double s = 0.0;
    for (const Corner& cr : mesh.node_cells(u)) s += dot(mesh.corner_normal(cr.cell, cr.local), scratch[cr.cell]);
    y[ui] = s / mesh.dual_area_unique(u);
  });
}

}  // namespace fvstag
