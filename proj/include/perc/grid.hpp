#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "perc/point_process.hpp"

namespace perc {

// Uniform grid over the point set's box with cell size exactly r.
// A point's cell is floor((coord - box.lower) / r) per axis, so any two points
// at distance < r lie in the same or Chebyshev-adjacent cells.
//
// Cells are addressed by integer coordinates. When the box spans few enough
// cells the buckets are stored CSR-style over the linearized cell index
// (points sorted by cell, ascending point index within a cell); otherwise a
// hash map keyed by the cell coordinates is used.
class GridIndex {
 public:
  GridIndex(const PointSet& points, double r);

  int dim() const { return dim_; }
  double cell_size() const { return cell_; }
  bool dense() const { return dense_; }
  std::size_t nonempty_bucket_count() const;

  // Cell coordinates of a point (clamped into the box's cell range).
  void cell_of(std::span<const double> point, std::int64_t* out) const;

  // Point indices in one cell; empty span if the cell is empty or out of range.
  std::span<const std::uint32_t> bucket(std::span<const std::int64_t> cell) const;

  // Inclusive per-axis cell coordinate bounds covered by the box.
  std::int64_t cell_min(int) const { return 0; }
  std::int64_t cell_max(int axis) const { return counts_[static_cast<std::size_t>(axis)] - 1; }

  // Visit every point whose cell lies in the inclusive coordinate range
  // [lo[a], hi[a]] per axis. Dense storage walks rows of contiguous cells;
  // sparse storage filters the nonempty buckets.
  void for_points_in_cell_range(const std::int64_t* lo, const std::int64_t* hi,
                                const std::function<void(std::uint32_t)>& fn) const;

  // Visit (cell coordinates, bucket) for every nonempty bucket.
  void for_each_bucket(
      const std::function<void(std::span<const std::int64_t>, std::span<const std::uint32_t>)>& fn)
      const;

  // Internals used by the clustering hot loops.
  std::size_t linear_index(const std::int64_t* cell) const;
  std::span<const std::uint32_t> dense_linear_range(std::size_t lin_lo, std::size_t lin_hi) const;

 private:
  struct CellKeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const;
  };

  int dim_;
  double cell_;
  bool dense_;
  std::vector<double> origin_;
  std::vector<std::int64_t> counts_;   // cells per axis
  std::vector<std::size_t> strides_;   // linear index strides (dense)
  std::vector<std::uint32_t> offsets_;  // CSR offsets, size total_cells + 1 (dense)
  std::vector<std::uint32_t> indices_;  // point indices sorted by cell (dense)
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::uint32_t>, CellKeyHash> map_;
};

GridIndex build_grid(const PointSet& points, double r);

}  // namespace perc
