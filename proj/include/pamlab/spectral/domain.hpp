#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "pamlab/core/types.hpp"

namespace pamlab::spectral {

/// Union of closed axis-aligned cells cell_size * (c + [0,1]^d); the domain is
/// the interior of that union.  Cells are kept sorted and unique.
struct GridDomain {
  int dim = 1;
  std::vector<Site> cells;
  int nodes_per_cell = 8;  // m, mesh width h = cell_size / m
  double cell_size = 1.0;

  static GridDomain box(int dim, const Site& lo, const Site& hi, int nodes_per_cell, double cell_size = 1.0);
  static GridDomain from_cells(int dim, std::vector<Site> cells, int nodes_per_cell, double cell_size = 1.0);

  /// Lambda_L: L = max(1, round(side)) unit cells per axis, index range
  /// [-floor(L/2), -floor(L/2) + L - 1].
  static GridDomain centred_box(int dim, double side, int nodes_per_cell);

  double h() const { return cell_size / nodes_per_cell; }
  double volume() const;
  bool contains_cell(const Site& c) const;
  bool is_face_connected() const;
  bool is_lattice_animal() const { return !cells.empty() && is_face_connected(); }

  /// Bounding box of the cell indices.
  LatticeBox cell_bounds() const;

  /// Euclidean distance from x to scale * (closure of the domain).
  double distance_to(const Point& x, double scale = 1.0) const;
};

/// Interior grid nodes of a GridDomain with their 2d-neighbour table.  Node
/// coordinates are integer multiples of h; exterior neighbours are -1.
class Mesh {
 public:
  explicit Mesh(const GridDomain& domain);

  std::size_t size() const { return coords_.size(); }
  int dim() const { return dim_; }
  double h() const { return h_; }
  double cell_volume() const;  // h^d
  const GridDomain& domain() const { return domain_; }

  const Site& grid_coord(std::size_t i) const { return coords_[i]; }
  Point position(std::size_t i) const { return h_ * to_point(coords_[i]); }

  /// Neighbour indices of node i, order (-e_0, +e_0, -e_1, +e_1, ...).
  std::span<const std::int64_t> neighbors(std::size_t i) const {
    return {neighbors_.data() + i * std::size_t(2 * dim_), std::size_t(2 * dim_)};
  }

  std::int64_t find(const Site& grid) const;

  /// Node sets of the connected components of the neighbour graph.
  std::vector<std::vector<std::size_t>> components() const;

  /// In one dimension nodes are ordered by coordinate; consecutive nodes
  /// are adjacent unless the domain has a gap.
  bool linked_to_next(std::size_t i) const;

 private:
  GridDomain domain_;
  int dim_;
  double h_;
  std::vector<Site> coords_;
  std::vector<std::int64_t> neighbors_;
  std::unordered_map<Site, std::int64_t, SiteHash> index_;
};

}  // namespace pamlab::spectral
