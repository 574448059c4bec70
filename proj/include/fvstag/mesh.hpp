#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fvstag/types.hpp"

namespace fvstag {

struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

// Triangle side shared by one or two cells. `left` owns the side as its local
// edge `left_local` (from local vertex k to k+1); `normal` is the unit normal
// pointing out of `left`. `right` is -1 on a physical boundary.
struct Edge {
  int left = -1;
  int right = -1;
  int left_local = 0;
  int right_local = 0;
  double length = 0.0;
  Vec3 normal;
};

// (cell, local vertex) pair used by the node-to-cell fans.
struct Corner {
  int cell = 0;
  int local = 0;
};

struct RawMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::pair<int, int>> periodic_pairs;
};

// Primal triangulation plus the staggered dual (star polygon) geometry.
//
// Periodic copies of a node are kept as separate entries of `nodes()` so that
// every triangle has unwrapped coordinates. Copies are grouped into "unique
// nodes": dual cells, dual areas and boundary corner vectors are defined per
// unique node, and node fields store equal values on all copies.
class Mesh {
 public:
  // Builds the geometry from raw data. Clockwise triangles are reoriented.
  // Throws GeometryError on degenerate cells and TopologyError on edges shared
  // by more than two cells.
  static Mesh from_raw(RawMesh raw);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_cells() const { return triangles_.size(); }
  std::size_t num_unique_nodes() const { return unique_rep_.size(); }

  std::span<const Vec3> nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  std::span<const int> periodic_map() const { return periodic_map_; }
  const std::vector<std::pair<int, int>>& periodic_pairs() const { return periodic_pairs_; }

  std::span<const Vec3> cell_barycenter() const { return barycenter_; }
  std::span<const double> cell_area() const { return cell_area_; }
  std::span<const double> incircle_diameter() const { return incircle_; }
  // Corner vector l_pc n_pc of local vertex k of cell c.
  const Vec3& corner_normal(int c, int k) const { return corner_normal_[3 * c + k]; }
  double subcell_area(int c, int k) const { return subcell_area_[3 * c + k]; }

  // Unique-node indexing.
  int unique_index(int node) const { return node_unique_[node]; }
  int unique_representative(int u) const { return unique_rep_[u]; }
  std::span<const int> unique_copies(int u) const {
    return {unique_copies_.data() + copies_offset_[u],
            static_cast<std::size_t>(copies_offset_[u + 1] - copies_offset_[u])};
  }
  // Unique index of local vertex k of cell c.
  int cell_unique(int c, int k) const { return cell_unique_[3 * c + k]; }

  double dual_area_unique(int u) const { return dual_area_[u]; }
  double dual_area(int node) const { return dual_area_[node_unique_[node]]; }
  std::span<const double> dual_areas_unique() const { return dual_area_; }

  // Cells around a unique node, ordered counter-clockwise.
  std::span<const Corner> node_cells(int u) const {
    return {fan_.data() + fan_offset_[u],
            static_cast<std::size_t>(fan_offset_[u + 1] - fan_offset_[u])};
  }

  std::span<const Edge> edges() const { return edges_; }
  // Edge index of local edge k of cell c.
  int cell_edge(int c, int k) const { return cell_edge_[3 * c + k]; }
  // Neighbor across local edge k of cell c, -1 on a boundary.
  int neighbor(int c, int k) const;

  bool is_boundary_unique(int u) const { return boundary_[u] != 0; }
  // l_pb n_pb of a unique node; zero for interior and periodic nodes.
  const Vec3& boundary_corner_unique(int u) const { return boundary_corner_[u]; }
  std::span<const int> boundary_uniques() const { return boundary_list_; }
  bool fully_periodic() const { return boundary_list_.empty(); }
  int reoriented_cells() const { return reoriented_; }

  double total_area() const;
  double min_incircle_diameter() const;
  double max_edge_length() const;
  Rect bounding_box() const;

  // Writes a node-indexed value through all copies of unique node u.
  template <class T>
  void scatter_unique(int u, const T& value, std::span<T> node_values) const {
    for (int p : unique_copies(u)) node_values[p] = value;
  }

 private:
  std::vector<Vec3> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::pair<int, int>> periodic_pairs_;
  std::vector<int> periodic_map_;

  std::vector<int> node_unique_;
  std::vector<int> unique_rep_;
  std::vector<int> copies_offset_;
  std::vector<int> unique_copies_;
  std::vector<int> cell_unique_;

  std::vector<Vec3> barycenter_;
  std::vector<double> cell_area_;
  std::vector<double> incircle_;
  std::vector<Vec3> corner_normal_;
  std::vector<double> subcell_area_;
  std::vector<double> dual_area_;

  std::vector<int> fan_offset_;
  std::vector<Corner> fan_;

  std::vector<Edge> edges_;
  std::vector<int> cell_edge_;

  std::vector<char> boundary_;
  std::vector<Vec3> boundary_corner_;
  std::vector<int> boundary_list_;
  int reoriented_ = 0;
};

struct StructuredMeshOptions {
  int nx = 3;
  int ny = 3;
  Rect domain;
  bool periodic_x = false;
  bool periodic_y = false;
  // Fraction of the lattice spacing, in [0, 0.3].
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

// nx-by-ny vertex lattice, each quad split along alternating diagonals.
Mesh generate_structured_triangulation(const StructuredMeshOptions& opt);

// Maximum residual of each geometric identity; reporting only.
struct GeometryReport {
  double cell_gauss = 0.0;       // max_c |sum_p l_pc n_pc| / perimeter(c)
  double node_gauss = 0.0;       // max over interior/periodic nodes
  double boundary_gauss = 0.0;   // max over boundary nodes of |sum - l_pb n_pb|
  double area_partition = 0.0;   // |sum |w_p| - sum |w_c|| / area
  double dual_partition = 0.0;   // max_p ||w_p| - sum |w_pc||
  double min_cell_area = 0.0;
  int flipped_cells = 0;         // clockwise cells repaired during construction

  bool ok(double tol = 1e-13) const {
    return cell_gauss <= tol && node_gauss <= tol && boundary_gauss <= tol &&
           area_partition <= 1e-12 && min_cell_area > 0.0;
  }
};

GeometryReport validate_geometry(const Mesh& mesh);

}  // namespace fvstag
