#include "fvstag/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace fvstag {

namespace {

double signed_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Outward normal scaled by length for the oriented segment a -> b of a
// counter-clockwise polygon.
Vec3 scaled_outward_normal(const Vec3& a, const Vec3& b) { return {b.y - a.y, a.x - b.x, 0.0}; }

double shoelace(std::span<const Vec3> poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

Mesh Mesh::from_raw(RawMesh raw) {
  Mesh m;
  m.nodes_ = std::move(raw.nodes);
  m.triangles_ = std::move(raw.triangles);
  m.periodic_pairs_ = std::move(raw.periodic_pairs);

  const int np = static_cast<int>(m.nodes_.size());
  const int nc = static_cast<int>(m.triangles_.size());

  for (int c = 0; c < nc; ++c) {
    for (int k = 0; k < 3; ++k) {
      const int p = m.triangles_[c][k];
      if (p < 0 || p >= np) {
        std::ostringstream os;
        os << "cell " << c << " references node " << p << " outside [0, " << np << ")";
        throw TopologyError(os.str());
      }
    }
  }

  // Periodic identification: canonical index is the smallest member of each
  // equivalence class.
  std::vector<int> parent(np);
  std::iota(parent.begin(), parent.end(), 0);
  for (auto [p, q] : m.periodic_pairs_) {
    if (p < 0 || p >= np || q < 0 || q >= np) throw TopologyError("periodic pair references a missing node");
    int rp = find_root(parent, p);
    int rq = find_root(parent, q);
    if (rp != rq) parent[std::max(rp, rq)] = std::min(rp, rq);
  }
  m.periodic_map_.resize(np);
  for (int p = 0; p < np; ++p) m.periodic_map_[p] = find_root(parent, p);

  m.node_unique_.assign(np, -1);
  for (int p = 0; p < np; ++p) {
    if (m.periodic_map_[p] == p) {
      m.node_unique_[p] = static_cast<int>(m.unique_rep_.size());
      m.unique_rep_.push_back(p);
    }
  }
  for (int p = 0; p < np; ++p) m.node_unique_[p] = m.node_unique_[m.periodic_map_[p]];
  const int nu = static_cast<int>(m.unique_rep_.size());
  m.copies_offset_.assign(nu + 1, 0);
  for (int p = 0; p < np; ++p) ++m.copies_offset_[m.node_unique_[p] + 1];
  std::partial_sum(m.copies_offset_.begin(), m.copies_offset_.end(), m.copies_offset_.begin());
  m.unique_copies_.resize(np);
  {
    std::vector<int> fill(m.copies_offset_.begin(), m.copies_offset_.end() - 1);
    for (int p = 0; p < np; ++p) m.unique_copies_[fill[m.node_unique_[p]]++] = p;
  }

  // Cell geometry.
  m.barycenter_.resize(nc);
  m.cell_area_.resize(nc);
  m.incircle_.resize(nc);
  m.corner_normal_.resize(3 * nc);
  m.subcell_area_.resize(3 * nc);
  m.cell_unique_.resize(3 * nc);
  for (int c = 0; c < nc; ++c) {
    auto& tri = m.triangles_[c];
    double a = signed_area(m.nodes_[tri[0]], m.nodes_[tri[1]], m.nodes_[tri[2]]);
    if (a < 0.0) {
      std::swap(tri[1], tri[2]);
      a = -a;
      ++m.reoriented_;
    }
    const Vec3& x1 = m.nodes_[tri[0]];
    const Vec3& x2 = m.nodes_[tri[1]];
    const Vec3& x3 = m.nodes_[tri[2]];
    const double perimeter = norm(x2 - x1) + norm(x3 - x2) + norm(x1 - x3);
    if (!(a > 1e-14 * perimeter * perimeter)) {
      std::ostringstream os;
      os << "degenerate cell " << c << " (area " << a << ")";
      throw GeometryError(os.str());
    }
    m.cell_area_[c] = a;
    m.barycenter_[c] = (1.0 / 3.0) * (x1 + x2 + x3);
    m.incircle_[c] = 4.0 * a / perimeter;

    for (int k = 0; k < 3; ++k) {
      const Vec3& xp = m.nodes_[tri[k]];
      const Vec3& xnext = m.nodes_[tri[(k + 1) % 3]];
      const Vec3& xprev = m.nodes_[tri[(k + 2) % 3]];
      const Vec3 mid_next = 0.5 * (xp + xnext);
      const Vec3 mid_prev = 0.5 * (xprev + xp);
      // Half edges adjacent to p: (mid_prev -> p) and (p -> mid_next).
      m.corner_normal_[3 * c + k] =
          scaled_outward_normal(mid_prev, xp) + scaled_outward_normal(xp, mid_next);
      const std::array<Vec3, 4> quad{xp, mid_next, m.barycenter_[c], mid_prev};
      m.subcell_area_[3 * c + k] = shoelace(quad);
      m.cell_unique_[3 * c + k] = m.node_unique_[tri[k]];
    }
  }

  // Dual cells and counter-clockwise fans.
  m.dual_area_.assign(nu, 0.0);
  m.fan_offset_.assign(nu + 1, 0);
  for (int c = 0; c < nc; ++c)
    for (int k = 0; k < 3; ++k) ++m.fan_offset_[m.cell_unique_[3 * c + k] + 1];
  std::partial_sum(m.fan_offset_.begin(), m.fan_offset_.end(), m.fan_offset_.begin());
  m.fan_.resize(3 * nc);
  {
    std::vector<int> fill(m.fan_offset_.begin(), m.fan_offset_.end() - 1);
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < 3; ++k) m.fan_[fill[m.cell_unique_[3 * c + k]]++] = Corner{c, k};
  }
  for (int u = 0; u < nu; ++u) {
    auto begin = m.fan_.begin() + m.fan_offset_[u];
    auto end = m.fan_.begin() + m.fan_offset_[u + 1];
    auto angle = [&m](const Corner& cr) {
      const Vec3 d = m.barycenter_[cr.cell] - m.nodes_[m.triangles_[cr.cell][cr.local]];
      return std::atan2(d.y, d.x);
    };
    std::sort(begin, end, [&](const Corner& a, const Corner& b) {
      const double ta = angle(a);
      const double tb = angle(b);
      return ta != tb ? ta < tb : a.cell < b.cell;
    });
    double s = 0.0;
    for (auto it = begin; it != end; ++it) s += m.subcell_area_[3 * it->cell + it->local];
    m.dual_area_[u] = s;
  }

  // Edges, matched by unique endpoints and by edge vector so that distinct
  // periodic images of the same endpoint pair are kept apart.
  const Rect bb = m.bounding_box();
  const double vec_tol = 1e-9 * std::max(bb.width(), bb.height());
  std::unordered_map<std::uint64_t, std::vector<int>> lookup;
  m.cell_edge_.assign(3 * nc, -1);
  for (int c = 0; c < nc; ++c) {
    const auto& tri = m.triangles_[c];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      int ua = m.node_unique_[a];
      int ub = m.node_unique_[b];
      Vec3 vec = m.nodes_[b] - m.nodes_[a];
      if (ua > ub) {
        std::swap(ua, ub);
        vec = -vec;
      }
      const std::uint64_t key = (static_cast<std::uint64_t>(ua) << 32) | static_cast<std::uint32_t>(ub);
      auto& cands = lookup[key];
      int match = -1;
      for (int e : cands) {
        const Edge& ed = m.edges_[e];
        const auto& lt = m.triangles_[ed.left];
        int la = lt[ed.left_local];
        int lb = lt[(ed.left_local + 1) % 3];
        Vec3 v2 = m.nodes_[lb] - m.nodes_[la];
        if (m.node_unique_[la] > m.node_unique_[lb]) v2 = -v2;
        if (norm(v2 - vec) <= vec_tol) {
          match = e;
          break;
        }
      }
      if (match < 0) {
        Edge ed;
        ed.left = c;
        ed.left_local = k;
        const Vec3 d = m.nodes_[b] - m.nodes_[a];
        ed.length = norm(d);
        ed.normal = (1.0 / ed.length) * Vec3{d.y, -d.x, 0.0};
        m.edges_.push_back(ed);
        cands.push_back(static_cast<int>(m.edges_.size()) - 1);
        m.cell_edge_[3 * c + k] = static_cast<int>(m.edges_.size()) - 1;
      } else {
        Edge& ed = m.edges_[match];
        if (ed.right >= 0) {
          std::ostringstream os;
          os << "non-conforming mesh: edge between nodes " << a << " and " << b
             << " is shared by more than two cells (cells " << ed.left << ", " << ed.right << ", " << c << ")";
          throw TopologyError(os.str());
        }
        ed.right = c;
        ed.right_local = k;
        m.cell_edge_[3 * c + k] = match;
      }
    }
  }

  // Boundary corner vectors from the unmatched edges.
  m.boundary_.assign(nu, 0);
  m.boundary_corner_.assign(nu, Vec3{});
  for (const Edge& ed : m.edges_) {
    if (ed.right >= 0) continue;
    const auto& tri = m.triangles_[ed.left];
    const int a = tri[ed.left_local];
    const int b = tri[(ed.left_local + 1) % 3];
    const Vec3 mid = 0.5 * (m.nodes_[a] + m.nodes_[b]);
    const int ua = m.node_unique_[a];
    const int ub = m.node_unique_[b];
    m.boundary_corner_[ua] += scaled_outward_normal(m.nodes_[a], mid);
    m.boundary_corner_[ub] += scaled_outward_normal(mid, m.nodes_[b]);
    m.boundary_[ua] = 1;
    m.boundary_[ub] = 1;
  }
  for (int u = 0; u < nu; ++u)
    if (m.boundary_[u]) m.boundary_list_.push_back(u);

  return m;
}

int Mesh::neighbor(int c, int k) const {
  const Edge& e = edges_[cell_edge_[3 * c + k]];
  return e.left == c && e.left_local == k ? e.right : e.left;
}

double Mesh::total_area() const { return std::accumulate(cell_area_.begin(), cell_area_.end(), 0.0); }

double Mesh::min_incircle_diameter() const { return *std::min_element(incircle_.begin(), incircle_.end()); }

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const Edge& e : edges_) h = std::max(h, e.length);
  return h;
}

Rect Mesh::bounding_box() const {
  Rect r{nodes_[0].x, nodes_[0].x, nodes_[0].y, nodes_[0].y};
  for (const Vec3& x : nodes_) {
    r.x0 = std::min(r.x0, x.x);
    r.x1 = std::max(r.x1, x.x);
    r.y0 = std::min(r.y0, x.y);
    r.y1 = std::max(r.y1, x.y);
  }
  return r;
}

Mesh generate_structured_triangulation(const StructuredMeshOptions& opt) {
  if (opt.nx < 3 || opt.ny < 3) throw ConfigError("structured triangulation needs nx >= 3 and ny >= 3");
  if (!(opt.jitter >= 0.0 && opt.jitter <= 0.3)) throw ConfigError("jitter must lie in [0, 0.3]");
  if (!(opt.domain.width() > 0.0 && opt.domain.height() > 0.0)) throw ConfigError("empty domain rectangle");

  const int nx = opt.nx;
  const int ny = opt.ny;
  const double dx = opt.domain.width() / (nx - 1);
  const double dy = opt.domain.height() / (ny - 1);

  RawMesh raw;
  raw.nodes.resize(static_cast<std::size_t>(nx) * ny);
  auto id = [nx](int i, int j) { return j * nx + i; };

  // Offsets are drawn per lattice site in a fixed order so that paired
  // periodic nodes receive identical jitter.
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-opt.jitter, opt.jitter);
  std::vector<Vec3> offset(raw.nodes.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double ox = dist(rng) * dx;
      const double oy = dist(rng) * dy;
      offset[id(i, j)] = {ox, oy, 0.0};
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int si = i;
      int sj = j;
      if (opt.periodic_x && i == nx - 1) si = 0;
      if (opt.periodic_y && j == ny - 1) sj = 0;
      Vec3 o = offset[id(si, sj)];
      if (!opt.periodic_x && (i == 0 || i == nx - 1)) o.x = 0.0;
      if (!opt.periodic_y && (j == 0 || j == ny - 1)) o.y = 0.0;
      raw.nodes[id(i, j)] = {opt.domain.x0 + i * dx + o.x, opt.domain.y0 + j * dy + o.y, 0.0};
    }

  raw.triangles.reserve(2 * static_cast<std::size_t>(nx - 1) * (ny - 1));
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx - 1; ++i) {
      const int p00 = id(i, j);
      const int p10 = id(i + 1, j);
      const int p01 = id(i, j + 1);
      const int p11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        raw.triangles.push_back({p00, p10, p11});
        raw.triangles.push_back({p00, p11, p01});
      } else {
        raw.triangles.push_back({p00, p10, p01});
        raw.triangles.push_back({p10, p11, p01});
      }
    }

  if (opt.periodic_x)
    for (int j = 0; j < ny; ++j) raw.periodic_pairs.emplace_back(id(0, j), id(nx - 1, j));
  if (opt.periodic_y)
    for (int i = 0; i < nx; ++i) raw.periodic_pairs.emplace_back(id(i, 0), id(i, ny - 1));

  for (std::size_t c = 0; c < raw.triangles.size(); ++c) {
    const auto& t = raw.triangles[c];
    if (signed_area(raw.nodes[t[0]], raw.nodes[t[1]], raw.nodes[t[2]]) <= 0.0) {
      std::ostringstream os;
      os << "jitter produced a degenerate or inverted cell " << c;
      throw GeometryError(os.str());
    }
  }
  return Mesh::from_raw(std::move(raw));
}

GeometryReport validate_geometry(const Mesh& mesh) {
  GeometryReport r;
  const int nc = static_cast<int>(mesh.num_cells());
  const int nu = static_cast<int>(mesh.num_unique_nodes());
  r.min_cell_area = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.triangles()[c];
    const auto x = mesh.nodes();
    const double perim = norm(x[t[1]] - x[t[0]]) + norm(x[t[2]] - x[t[1]]) + norm(x[t[0]] - x[t[2]]);
    Vec3 s;
    for (int k = 0; k < 3; ++k) s += mesh.corner_normal(c, k);
    r.cell_gauss = std::max(r.cell_gauss, norm(s) / perim);
    r.min_cell_area = std::min(r.min_cell_area, signed_area(x[t[0]], x[t[1]], x[t[2]]));
  }
  r.flipped_cells = mesh.reoriented_cells();
  double dual_total = 0.0;
  for (int u = 0; u < nu; ++u) {
    Vec3 s;
    double sub = 0.0;
    for (const Corner& cr : mesh.node_cells(u)) {
      s += mesh.corner_normal(cr.cell, cr.local);
      sub += mesh.subcell_area(cr.cell, cr.local);
    }
    if (mesh.is_boundary_unique(u))
      r.boundary_gauss = std::max(r.boundary_gauss, norm(s - mesh.boundary_corner_unique(u)));
    else
      r.node_gauss = std::max(r.node_gauss, norm(s));
    r.dual_partition = std::max(r.dual_partition, std::abs(sub - mesh.dual_area_unique(u)));
    dual_total += mesh.dual_area_unique(u);
  }
  const double area = mesh.total_area();
  r.area_partition = std::abs(dual_total - area) / area;
  return r;
}

}  // namespace fvstag
